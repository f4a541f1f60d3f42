#pragma once

#include "cbo/objectives.hpp"
#include "cbo/rng.hpp"
#include "cbo/types.hpp"

namespace cbo {

// Weighted average of particle positions with weights exp(-alpha * value).
// The minimum value is subtracted inside the exponentials, which stabilizes
// large alpha and makes the result exactly invariant under constant offsets
// of the values. The returned point is clamped into the componentwise hull
// of the positions so the convex-hull property holds exactly.
ConsensusResult consensus_point(const Ensemble& ensemble, const Eigen::VectorXd& values, double alpha);

// Radial clamp of v into the ball of the given radius about center. Points
// inside the ball (and any point when radius is infinite) are returned
// unchanged; points outside land just inside the sphere, with the landing
// verified so re-projection is an exact no-op.
Eigen::VectorXd project_ball(const Eigen::VectorXd& v, const Eigen::VectorXd& center, double radius);

// Noise amplitude per particle in isotropic mode: min(|row - consensus|_2, m).
Eigen::VectorXd isotropic_amplitudes(const Ensemble& ensemble, const Eigen::VectorXd& consensus, double m);

// Per-coordinate amplitudes in anisotropic mode: min(|row_j - consensus_j|, m).
Eigen::MatrixXd anisotropic_amplitudes(const Ensemble& ensemble, const Eigen::VectorXd& consensus, double m);

// One update of every particle:
//   V <- V - dt * lambda * (V - P(v_a)) + sigma * amp * B
// where v_a is the consensus point of (ensemble, values), P the radial clamp
// into the ball of radius proj_r about proj_center, amp the truncated
// distance to the (unprojected) consensus, and B the supplied noise rows
// (i.i.d. N(0, dt) entries). The same consensus is used for all particles.
Ensemble step_isotropic(const Ensemble& ensemble, const Eigen::VectorXd& values, const CboParams& params,
                        const Eigen::MatrixXd& noise);

// Same drift; the noise term uses per-coordinate truncated amplitudes.
Ensemble step_anisotropic(const Ensemble& ensemble, const Eigen::VectorXd& values, const CboParams& params,
                          const Eigen::MatrixXd& noise);

// Draws an ensemble from the init law (row-major fill order).
Ensemble init_ensemble(const InitLaw& init, int n_particles, Rng& rng);

// Full optimization run: sample the ensemble, iterate n_steps updates,
// report the final ensemble mean and its distance to the known minimizer.
// A non-finite objective value or position marks the outcome as diverged
// (with the step index) and counts as failure; no exception is thrown.
RunOutcome run(const CboParams& params, const ObjectiveSpec& objective, std::uint64_t seed,
               const RunOptions& options = {});

}  // namespace cbo
