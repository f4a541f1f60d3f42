#include "cbo/meanfield.hpp"

#include "cbo/errors.hpp"
#include "cbo/parallel.hpp"
#include "cbo/rng.hpp"
#include "cbo/summation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

namespace cbo {

double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return x[0];
  if (n == 2) return x[0] + x[1];
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace cbo

namespace cbo::meanfield {

namespace {

constexpr double kOverflowGuard = 1e150;

void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void LimitParams::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("lambda: must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("sigma: must be nonnegative");
  if (!(trunc_m > 0.0)) throw ConfigError("trunc_m: must be positive (inf disables truncation)");
  if (dim < 1) throw ConfigError("dim: must be >= 1");
  if (!(dt > 0.0) || std::isinf(dt)) throw ConfigError("dt: must be positive and finite");
  if (!(horizon >= dt)) throw ConfigError("horizon: must be >= dt");
  if (samples < 1) throw ConfigError("samples: must be >= 1");
  if (!(init_variance >= 0.0)) throw ConfigError("init_variance: must be nonnegative");
  if (record_every < 1) throw ConfigError("record_every: must be >= 1");
  if (init_mean.size() != 0 && init_mean.size() != dim) throw ConfigError("init_mean: length must equal dim");
  if (minimizer.size() != 0 && minimizer.size() != dim) throw ConfigError("minimizer: length must equal dim");
}

namespace {

std::vector<int> record_steps(int n_steps, int every) {
  std::vector<int> steps;
  for (int k = 0; k <= n_steps; k += every) steps.push_back(k);
  if (steps.back() != n_steps) steps.push_back(n_steps);
  return steps;
}

MomentTrajectory simulate_limit(const LimitParams& params, double p, std::uint64_t seed, bool truncated) {
  params.validate();
  if (!(p >= 1.0)) throw ConfigError("p: must be >= 1");
  if (truncated && std::isinf(params.trunc_m)) throw ConfigError("trunc_m: must be finite for the truncated dynamics");

  const int d = params.dim;
  const int n_steps = static_cast<int>(std::llround(params.horizon / params.dt));
  const std::vector<int> recs = record_steps(std::max(n_steps, 1), params.record_every);
  const std::size_t n_rec = recs.size();
  const int n_samples = params.samples;
  const double m_cap = truncated ? params.trunc_m : kInf;
  const double sqdt = std::sqrt(params.dt);

  const Eigen::VectorXd mean =
      params.init_mean.size() == 0 ? Eigen::VectorXd::Zero(d) : params.init_mean;
  const Eigen::VectorXd vstar =
      params.minimizer.size() == 0 ? Eigen::VectorXd::Zero(d) : params.minimizer;
  const double init_sd = std::sqrt(params.init_variance);

  // One column per trajectory; rows are the recorded times.
  Eigen::MatrixXd slots(static_cast<Eigen::Index>(n_rec), n_samples);
  std::vector<unsigned char> diverged(n_samples, 0);

  parallel_for(n_samples, thread_budget(), [&](int traj) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(traj)));
    Eigen::VectorXd y(d), xi(d);
    rng.fill_normal(y.data(), static_cast<std::size_t>(d));
    y = mean + init_sd * y;

    std::size_t rec_i = 0;
    double r = (y - vstar).norm();
    if (recs[rec_i] == 0) slots(static_cast<Eigen::Index>(rec_i++), traj) = std::pow(r, p);

    bool blown = false;
    for (int k = 1; k <= n_steps; ++k) {
      if (!blown) {
        const double amp = std::min(r, m_cap);
        rng.fill_normal(xi.data(), static_cast<std::size_t>(d));
        y = y - params.dt * params.lambda * (y - vstar) + params.sigma * amp * sqdt * xi;
        r = (y - vstar).norm();
        if (!(r < kOverflowGuard)) blown = true;
      }
      if (rec_i < n_rec && recs[rec_i] == k) {
        slots(static_cast<Eigen::Index>(rec_i++), traj) = blown ? kInf : std::pow(r, p);
      }
    }
    diverged[traj] = blown ? 1 : 0;
  });

  MomentTrajectory traj;
  traj.p = p;
  int n_div = 0;
  for (int i = 0; i < n_samples; ++i) n_div += diverged[i];
  traj.diverged_fraction = static_cast<double>(n_div) / static_cast<double>(n_samples);

  std::vector<double> sq(n_samples);
  for (std::size_t i = 0; i < n_rec; ++i) {
    const Eigen::VectorXd row = slots.row(static_cast<Eigen::Index>(i)).transpose();
    const double* row_begin = row.data();
    const double m = pairwise_sum(row_begin, n_samples) / static_cast<double>(n_samples);
    if (!std::isfinite(m)) {
      traj.truncated_early = true;
      break;
    }
    double se = 0.0;
    if (n_samples > 1) {
      for (int s = 0; s < n_samples; ++s) {
        const double c = row_begin[s] - m;
        sq[s] = c * c;
      }
      const double var = pairwise_sum(sq.data(), n_samples) / static_cast<double>(n_samples - 1);
      se = std::sqrt(std::max(var, 0.0) / static_cast<double>(n_samples));
    }
    traj.times.push_back(static_cast<double>(recs[i]) * params.dt);
    traj.moments.push_back(m);
    traj.stderrs.push_back(se);
  }
  return traj;
}

}  // namespace

MomentTrajectory simulate_limit_standard(const LimitParams& params, double p, std::uint64_t seed) {
  return simulate_limit(params, p, seed, false);
}

MomentTrajectory simulate_limit_truncated(const LimitParams& params, double p, std::uint64_t seed) {
  return simulate_limit(params, p, seed, true);
}

double rate_standard(double lambda, double sigma, int dim, double p) {
  return p * (-lambda + sigma * sigma * (p + static_cast<double>(dim) - 2.0) / 2.0);
}

double bound_truncated(double lambda, double sigma, double trunc_m, int dim, double p, double t,
                       double initial_moment) {
  if (std::isinf(trunc_m)) throw ConfigError("trunc_m: must be finite for the truncated bound");
  const double plateau = std::pow(sigma, p) * std::pow(trunc_m, p) *
                         std::pow(static_cast<double>(dim) + p - 2.0, p / 2.0) / std::pow(lambda, p / 2.0);
  return std::exp(-lambda * t) * initial_moment + plateau;
}

double threshold_exponent(double lambda, double sigma, int dim) {
  if (sigma == 0.0) throw ConfigError("sigma: no finite threshold exponent for zero noise");
  return 2.0 * lambda / (sigma * sigma) - static_cast<double>(dim) + 2.0;
}

double fit_growth_rate(const MomentTrajectory& traj, const FitOptions& options) {
  const std::size_t n = traj.times.size();
  if (n < 2) throw RuntimeError("fit_growth_rate: needs at least two recorded moments");
  const double t0 = traj.times.front();
  const double t1 = traj.times.back();
  const double lo = t0 + options.lo_frac * (t1 - t0);
  const double hi = t0 + options.hi_frac * (t1 - t0);

  auto usable = [&](std::size_t i, bool apply_stderr_filter) {
    const double t = traj.times[i];
    const double m = traj.moments[i];
    if (t < lo || t > hi) return false;
    if (!(m > 0.0) || !std::isfinite(m)) return false;
    if (apply_stderr_filter && traj.stderrs[i] > options.max_rel_stderr * m) return false;
    return true;
  };

  for (bool filter : {true, false}) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!usable(i, filter)) continue;
      const double t = traj.times[i];
      const double l = std::log(traj.moments[i]);
      st += t;
      sl += l;
      stt += t * t;
      stl += t * l;
      ++cnt;
    }
    if (cnt < 2) continue;
    const double c = static_cast<double>(cnt);
    const double denom = stt - st * st / c;
    if (denom <= 0.0) continue;
    return (stl - st * sl / c) / denom;
  }
  throw RuntimeError("fit_growth_rate: not enough usable points in the fit window");
}

std::string trajectory_csv(const MomentTrajectory& traj) {
  std::string out = "t,moment,stderr\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    append_double(out, traj.times[i]);
    out.push_back(',');
    append_double(out, traj.moments[i]);
    out.push_back(',');
    append_double(out, traj.stderrs[i]);
    out.push_back('\n');
  }
  return out;
}

}  // namespace cbo::meanfield
