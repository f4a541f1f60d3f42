#include "cbo/core.hpp"

#include "cbo/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace cbo {

void CboParams::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("lambda: must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("sigma: must be nonnegative");
  if (!(alpha > 0.0)) throw ConfigError("alpha: must be positive");
  if (!(dt > 0.0) || std::isinf(dt)) throw ConfigError("dt: must be positive and finite");
  if (!(trunc_m > 0.0)) throw ConfigError("trunc_m: must be positive (inf disables truncation)");
  if (!(proj_r > 0.0)) throw ConfigError("proj_r: must be positive (inf disables projection)");
  if (lambda * dt >= 1.0) throw ConfigError("lambda*dt: must be < 1, the drift step is contractive");
  if (n_particles < 1) throw ConfigError("n_particles: must be >= 1");
  if (n_steps < 0) throw ConfigError("n_steps: must be >= 0");
  if (init.mean.size() < 1) throw ConfigError("init.mean: dimension must be >= 1");
  if (!(init.variance_per_coord > 0.0)) throw ConfigError("init.variance_per_coord: must be positive");
  if (proj_center.size() != 0 && proj_center.size() != init.mean.size())
    throw ConfigError("proj_center: length must equal dim");
}

ConsensusResult consensus_point(const Ensemble& ensemble, const Eigen::VectorXd& values, double alpha) {
  if (ensemble.n_particles() < 1) throw ConfigError("ensemble: needs at least one particle");
  if (values.size() != ensemble.n_particles()) throw ConfigError("values: length must equal particle count");
  if (!(alpha > 0.0)) throw ConfigError("alpha: must be positive");
  if (!values.allFinite()) throw RuntimeError("objective produced non-finite value");

  Eigen::Index amin = 0;
  const double fmin = values.minCoeff(&amin);
  Eigen::ArrayXd w = (-alpha * (values.array() - fmin)).exp();
  w /= w.sum();

  Eigen::VectorXd point = ensemble.positions.transpose() * w.matrix();
  const Eigen::VectorXd lo = ensemble.positions.colwise().minCoeff().transpose();
  const Eigen::VectorXd hi = ensemble.positions.colwise().maxCoeff().transpose();
  point = point.cwiseMax(lo).cwiseMin(hi);

  return ConsensusResult{std::move(point), amin, w.matrix()};
}

Eigen::VectorXd project_ball(const Eigen::VectorXd& v, const Eigen::VectorXd& center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("radius: must be positive (inf disables projection)");
  if (std::isinf(radius)) return v;
  if (center.size() != v.size()) throw ConfigError("center: length must equal point dimension");
  const Eigen::VectorXd diff = v - center;
  const double dist = diff.norm();
  if (dist <= radius) return v;
  // Land slightly inside the sphere and verify the representable result: the
  // rounding of center + scale * diff can exceed any fixed relative bias when
  // the radius is small against the center coordinates, so the margin doubles
  // until the landed point re-measures as inside. That makes re-projection an
  // exact no-op. The first pass succeeds in all but degenerate cases.
  double margin = 4.0 * std::numeric_limits<double>::epsilon();
  Eigen::VectorXd out = center + ((radius / dist) * (1.0 - margin)) * diff;
  while (true) {
    const Eigen::VectorXd d2 = out - center;
    const double dist2 = d2.norm();
    if (dist2 <= radius) return out;
    margin *= 2.0;
    out = center + ((radius / dist2) * std::max(0.0, 1.0 - margin)) * d2;
  }
}

Eigen::VectorXd isotropic_amplitudes(const Ensemble& ensemble, const Eigen::VectorXd& consensus, double m) {
  return (ensemble.positions.rowwise() - consensus.transpose()).rowwise().norm().cwiseMin(m);
}

Eigen::MatrixXd anisotropic_amplitudes(const Ensemble& ensemble, const Eigen::VectorXd& consensus, double m) {
  return (ensemble.positions.rowwise() - consensus.transpose()).cwiseAbs().cwiseMin(m);
}

namespace {

Eigen::VectorXd projection_center(const CboParams& params, Eigen::Index d) {
  return params.proj_center.size() == 0 ? Eigen::VectorXd::Zero(d) : params.proj_center;
}

Ensemble step_common(const Ensemble& ensemble, const Eigen::VectorXd& values, const CboParams& params,
                     const Eigen::MatrixXd& noise, bool anisotropic) {
  if (noise.rows() != ensemble.n_particles() || noise.cols() != ensemble.dim())
    throw ConfigError("noise: shape must match the ensemble");

  const ConsensusResult cons = consensus_point(ensemble, values, params.alpha);
  const Eigen::VectorXd target =
      project_ball(cons.point, projection_center(params, ensemble.dim()), params.proj_r);

  Ensemble out;
  const Eigen::MatrixXd drift =
      params.dt * params.lambda * (ensemble.positions.rowwise() - target.transpose());
  if (anisotropic) {
    const Eigen::MatrixXd amp = anisotropic_amplitudes(ensemble, cons.point, params.trunc_m);
    out.positions = ensemble.positions - drift + params.sigma * amp.cwiseProduct(noise);
  } else {
    const Eigen::VectorXd amp = isotropic_amplitudes(ensemble, cons.point, params.trunc_m);
    out.positions = ensemble.positions - drift + params.sigma * (noise.array().colwise() * amp.array()).matrix();
  }
  return out;
}

}  // namespace

Ensemble step_isotropic(const Ensemble& ensemble, const Eigen::VectorXd& values, const CboParams& params,
                        const Eigen::MatrixXd& noise) {
  return step_common(ensemble, values, params, noise, false);
}

Ensemble step_anisotropic(const Ensemble& ensemble, const Eigen::VectorXd& values, const CboParams& params,
                          const Eigen::MatrixXd& noise) {
  return step_common(ensemble, values, params, noise, true);
}

Ensemble init_ensemble(const InitLaw& init, int n_particles, Rng& rng) {
  const Eigen::Index d = init.mean.size();
  Ensemble ens;
  ens.positions = gaussian_increments(rng, n_particles, d, 1.0) * std::sqrt(init.variance_per_coord);
  ens.positions.rowwise() += init.mean.transpose();
  return ens;
}

RunOutcome run(const CboParams& params, const ObjectiveSpec& objective, std::uint64_t seed,
               const RunOptions& options) {
  params.validate();
  if (objective.dim != params.dim()) throw ConfigError("objective dim does not match params dim");
  if (!(options.tolerance > 0.0)) throw ConfigError("tolerance: must be positive");

  Rng rng(seed);
  Ensemble ens = init_ensemble(params.init, params.n_particles, rng);
  const bool aniso = params.noise_mode == NoiseMode::Anisotropic;

  RunOutcome out;
  if (options.record_trace) out.trace.emplace();

  for (int k = 0; k < params.n_steps; ++k) {
    const Eigen::VectorXd values = eval_batch(objective, ens);
    if (!values.allFinite()) {
      out.diverged = true;
      out.diverged_step = k;
      break;
    }
    const Eigen::MatrixXd noise = gaussian_increments(rng, ens.n_particles(), ens.dim(), params.dt);
    if (options.record_trace) {
      TracePoint tp;
      tp.consensus = consensus_point(ens, values, params.alpha).point;
      tp.mean_distance = (ens.positions.colwise().mean().transpose() - objective.minimizer).norm();
      out.trace->push_back(std::move(tp));
    }
    ens = step_common(ens, values, params, noise, aniso);
  }

  if (!out.diverged && !ens.positions.allFinite()) {
    out.diverged = true;
    out.diverged_step = params.n_steps;
  }

  out.final_mean = ens.positions.colwise().mean().transpose();
  if (out.diverged) {
    out.distance_to_minimizer = kInf;
    out.success = false;
  } else {
    out.distance_to_minimizer = (out.final_mean - objective.minimizer).norm();
    out.success = out.distance_to_minimizer <= options.tolerance;
  }
  return out;
}

}  // namespace cbo
