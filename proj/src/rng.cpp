#include "cbo/rng.hpp"

#include "cbo/errors.hpp"

#include <cmath>
#include <numbers>

namespace cbo {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(mix64(root) ^ a) ^ b);
}

namespace {

// One Box-Muller pair from two uniforms. u1 must lie in (0, 1].
inline void box_muller(double u1, double u2, double& z0, double& z1) {
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(t);
  z1 = r * std::sin(t);
}

}  // namespace

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double z0, z1;
  box_muller(1.0 - uniform01(), uniform01(), z0, z1);
  spare_ = z1;
  has_spare_ = true;
  return z0;
}

void Rng::fill_normal(double* dst, std::size_t count) {
  std::size_t i = 0;
  for (; i + 1 < count; i += 2) box_muller(1.0 - uniform01(), uniform01(), dst[i], dst[i + 1]);
  if (i < count) {
    double z0, z1;
    box_muller(1.0 - uniform01(), uniform01(), z0, z1);
    dst[i] = z0;
  }
}

Eigen::MatrixXd gaussian_increments(Rng& rng, Eigen::Index n, Eigen::Index d, double dt) {
  if (dt <= 0.0) throw ConfigError("dt: must be positive");
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out(n, d);
  rng.fill_normal(out.data(), static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  const double s = std::sqrt(dt);
  return s * out;
}

}  // namespace cbo
