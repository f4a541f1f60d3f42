#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace cbo {

// splitmix64 finalizer; the basis of all seed derivation.
std::uint64_t mix64(std::uint64_t x);

// Derives a child seed from a root seed and one or two stream indices.
// Used so that parallel work items get independent, schedule-free streams.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0);

// Deterministic random source. Normal variates come from an explicit
// Box-Muller transform so the output does not depend on the standard
// library's unspecified choice of algorithm.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal variate (mean 0, variance 1).
  double normal();

  // Fills dst with count i.i.d. standard normals, pairwise Box-Muller.
  // Independent of the scalar normal() spare cache.
  void fill_normal(double* dst, std::size_t count);

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// n x d matrix of i.i.d. N(0, dt) entries, filled in row-major order.
Eigen::MatrixXd gaussian_increments(Rng& rng, Eigen::Index n, Eigen::Index d, double dt);

}  // namespace cbo
