#pragma once

#include <Eigen/Dense>
#include <limits>
#include <optional>
#include <vector>

namespace cbo {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NoiseMode { Isotropic, Anisotropic };

// Gaussian i.i.d. initialization: each coordinate mean[j] + sqrt(variance) * N(0,1).
struct InitLaw {
  Eigen::VectorXd mean;
  double variance_per_coord = 1.0;
};

// N particle positions in d dimensions, one row per particle.
struct Ensemble {
  Eigen::MatrixXd positions;

  Eigen::Index n_particles() const { return positions.rows(); }
  Eigen::Index dim() const { return positions.cols(); }
};

struct CboParams {
  double lambda = 1.0;   // drift rate
  double sigma = 0.3;    // noise level
  double alpha = 1e5;    // weight exponent
  double dt = 0.02;      // step size
  double trunc_m = kInf; // noise truncation level M (kInf disables)
  double proj_r = kInf;  // projection radius R (kInf disables)
  Eigen::VectorXd proj_center;  // projection center v_b; empty means origin
  NoiseMode noise_mode = NoiseMode::Isotropic;
  int n_particles = 100;
  int n_steps = 200;
  InitLaw init;

  Eigen::Index dim() const { return init.mean.size(); }

  // Throws ConfigError naming the offending field.
  void validate() const;
};

struct ConsensusResult {
  Eigen::VectorXd point;          // the weighted average
  Eigen::Index argmin_index = 0;  // particle with the smallest value
  Eigen::VectorXd shifted_weights;  // normalized weights, sum 1
};

struct TracePoint {
  Eigen::VectorXd consensus;
  double mean_distance = 0.0;  // distance of the ensemble mean to the minimizer
};

struct RunOutcome {
  Eigen::VectorXd final_mean;
  double distance_to_minimizer = kInf;
  bool success = false;
  bool diverged = false;
  int diverged_step = -1;  // step at which a non-finite value appeared
  std::optional<std::vector<TracePoint>> trace;
};

struct RunOptions {
  double tolerance = 0.1;
  bool record_trace = false;
};

}  // namespace cbo
