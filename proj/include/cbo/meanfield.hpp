#pragma once

#include "cbo/types.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace cbo::meanfield {

// Parameters of the one-particle limit SDE
//   dY = -lambda (Y - minimizer) dt + sigma * a(|Y - minimizer|) dB,
// with a(r) = r for the standard dynamics and a(r) = min(r, M) for the
// truncated one. Initialization is Gaussian i.i.d. per coordinate;
// init_variance 0 is allowed (point mass).
struct LimitParams {
  double lambda = 1.0;
  double sigma = 1.0;
  double trunc_m = kInf;
  int dim = 4;
  double dt = 1e-3;
  double horizon = 2.0;
  int samples = 10000;
  Eigen::VectorXd init_mean;   // empty means origin
  double init_variance = 1.0;
  Eigen::VectorXd minimizer;   // empty means origin
  int record_every = 1;        // record each k-th step (t=0 and the final step always)

  void validate() const;  // throws ConfigError
};

// Empirical p-th moments E|Y_t - minimizer|^p over the sample paths.
struct MomentTrajectory {
  std::vector<double> times;
  std::vector<double> moments;
  std::vector<double> stderrs;
  double p = 2.0;
  bool truncated_early = false;    // series cut at the first non-finite moment
  double diverged_fraction = 0.0;  // share of paths stopped by the overflow guard
};

// Standard limit dynamics (no truncation; trunc_m is ignored).
MomentTrajectory simulate_limit_standard(const LimitParams& params, double p, std::uint64_t seed);

// Truncated limit dynamics; requires finite trunc_m.
MomentTrajectory simulate_limit_truncated(const LimitParams& params, double p, std::uint64_t seed);

// Exact growth rate of the p-th moment under the standard limit dynamics:
// p * (-lambda + sigma^2 * (p + dim - 2) / 2).
double rate_standard(double lambda, double sigma, int dim, double p);

// Decay-plus-plateau bound for the truncated limit dynamics:
// exp(-lambda t) * initial_moment + sigma^p M^p (dim + p - 2)^{p/2} / lambda^{p/2}.
double bound_truncated(double lambda, double sigma, double trunc_m, int dim, double p, double t,
                       double initial_moment);

// Moment order at which the standard-dynamics rate changes sign:
// 2 lambda / sigma^2 - dim + 2. Errors out for sigma == 0.
double threshold_exponent(double lambda, double sigma, int dim);

struct FitOptions {
  double lo_frac = 0.1;          // fit window as fractions of the horizon
  double hi_frac = 0.9;
  double max_rel_stderr = 0.05;  // drop points whose stderr exceeds this share of the moment
};

// Least-squares slope of log(moment) over time, restricted to the fit window
// and to points whose moment estimate is statistically tight. Falls back to
// the plain window if the stderr filter leaves fewer than two points.
double fit_growth_rate(const MomentTrajectory& traj, const FitOptions& options = {});

// CSV with header t,moment,stderr and one row per recorded time.
std::string trajectory_csv(const MomentTrajectory& traj);

}  // namespace cbo::meanfield
