#include "cbo/errors.hpp"
#include "cbo/meanfield.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace cbo;
using namespace cbo::meanfield;

TEST_SUITE("meanfield") {

TEST_CASE("closed-form rate, bound and threshold match independent evaluation") {
  CHECK(rate_standard(1.0, 1.0, 4, 2.0) == 2.0);
  CHECK(rate_standard(1.3, 0.7, 6, 2.5) == doctest::Approx(0.73125).epsilon(1e-15));
  CHECK(rate_standard(1.0, 0.0, 9, 3.0) == -3.0);
  CHECK(bound_truncated(0.8, 0.6, 2.0, 5, 3.0, 1.7, 12.5) ==
        doctest::Approx(38.7006814382542126606).epsilon(1e-14));
  CHECK(threshold_exponent(1.2, 0.9, 7) == doctest::Approx(-2.03703703703703703704).epsilon(1e-15));
  CHECK(threshold_exponent(1.0, 1.0, 4) == doctest::Approx(0.0));
  CHECK_THROWS_AS(threshold_exponent(1.0, 0.0, 4), ConfigError);
  CHECK_THROWS_AS(bound_truncated(1.0, 1.0, kInf, 4, 2.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("zero noise decays deterministically at rate p*lambda") {
  LimitParams params;
  params.lambda = 1.3;
  params.sigma = 0.0;
  params.dim = 3;
  params.dt = 1e-3;
  params.horizon = 1.0;
  params.samples = 200;
  params.record_every = 50;
  const MomentTrajectory traj = simulate_limit_standard(params, 2.0, 4);
  REQUIRE(traj.times.size() >= 3);
  CHECK(!traj.truncated_early);
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    const double dt_rec = traj.times[i] - traj.times[i - 1];
    const double expected = std::exp(-2.0 * params.lambda * dt_rec);
    // Euler discretization: the exact per-step factor is (1 - lambda*dt)^2.
    const double discrete = std::pow(1.0 - params.lambda * params.dt, 2.0 * dt_rec / params.dt);
    CHECK(traj.moments[i] / traj.moments[i - 1] == doctest::Approx(discrete).epsilon(1e-12));
    CHECK(traj.moments[i] / traj.moments[i - 1] == doctest::Approx(expected).epsilon(2e-3));
    CHECK(traj.stderrs[i] >= 0.0);
  }
}

TEST_CASE("noisy decay matches the predicted rate") {
  LimitParams params;
  params.lambda = 1.0;
  params.sigma = 0.5;
  params.dim = 4;
  params.dt = 1e-3;
  params.horizon = 2.0;
  params.samples = 2000;
  params.record_every = 20;
  const MomentTrajectory traj = simulate_limit_standard(params, 2.0, 11);
  CHECK(rate_standard(1.0, 0.5, 4, 2.0) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(fit_growth_rate(traj) == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("huge truncation level reproduces the standard dynamics bit for bit") {
  LimitParams params;
  params.lambda = 1.0;
  params.sigma = 0.8;
  params.dim = 4;
  params.dt = 1e-2;
  params.horizon = 1.0;
  params.samples = 500;
  params.record_every = 10;
  const MomentTrajectory std_traj = simulate_limit_standard(params, 2.0, 21);
  params.trunc_m = 1e9;
  const MomentTrajectory trunc_traj = simulate_limit_truncated(params, 2.0, 21);
  REQUIRE(std_traj.moments.size() == trunc_traj.moments.size());
  for (std::size_t i = 0; i < std_traj.moments.size(); ++i) {
    CHECK(std_traj.moments[i] == trunc_traj.moments[i]);
    CHECK(std_traj.stderrs[i] == trunc_traj.stderrs[i]);
  }
}

TEST_CASE("truncated moments respect the decay-plus-plateau envelope") {
  LimitParams params;
  params.lambda = 1.0;
  params.sigma = 1.0;
  params.trunc_m = 1.0;
  params.dim = 4;
  params.dt = 1e-3;
  params.horizon = 3.0;
  params.samples = 2000;
  params.record_every = 100;
  const MomentTrajectory traj = simulate_limit_truncated(params, 2.0, 31);
  const double m0 = traj.moments.front();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double envelope = bound_truncated(1.0, 1.0, 1.0, 4, 2.0, traj.times[i], m0);
    CHECK(traj.moments[i] <= envelope + 3.0 * traj.stderrs[i]);
  }
}

TEST_CASE("moment blow-up truncates the series instead of emitting garbage") {
  LimitParams params;
  params.lambda = 1.0;
  params.sigma = 20.0;
  params.dim = 10;
  params.dt = 0.1;
  params.horizon = 50.0;
  params.samples = 100;
  params.record_every = 1;
  const MomentTrajectory traj = simulate_limit_standard(params, 4.0, 8);
  CHECK(traj.truncated_early);
  REQUIRE(!traj.times.empty());
  for (double m : traj.moments) CHECK(std::isfinite(m));
  for (std::size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
}

TEST_CASE("truncated dynamics requires a finite truncation level") {
  LimitParams params;
  CHECK_THROWS_AS(simulate_limit_truncated(params, 2.0, 1), ConfigError);
}

TEST_CASE("parameter validation") {
  LimitParams params;
  params.dt = 0.0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.dt = 1e-3;
  params.horizon = 1e-4;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.horizon = 1.0;
  params.samples = 0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.samples = 10;
  params.init_variance = -1.0;
  CHECK_THROWS_AS(params.validate(), ConfigError);
  params.init_variance = 0.0;
  CHECK_NOTHROW(params.validate());
}

TEST_CASE("point-mass initialization gives an exact initial moment") {
  LimitParams params;
  params.lambda = 1.0;
  params.sigma = 0.5;
  params.dim = 4;
  params.dt = 1e-2;
  params.horizon = 0.1;
  params.samples = 256;
  params.init_variance = 0.0;
  params.init_mean = Eigen::VectorXd::Constant(4, 0.5);
  const MomentTrajectory traj = simulate_limit_standard(params, 2.0, 3);
  CHECK(traj.moments.front() == 1.0);
  CHECK(traj.stderrs.front() == 0.0);
}

TEST_CASE("growth-rate fit recovers an exact exponential") {
  MomentTrajectory traj;
  traj.p = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.02 * i;
    traj.times.push_back(t);
    traj.moments.push_back(3.0 * std::exp(1.7 * t));
    traj.stderrs.push_back(0.0);
  }
  CHECK(fit_growth_rate(traj) == doctest::Approx(1.7).epsilon(1e-9));
}

TEST_CASE("growth-rate fit ignores points outside the central window") {
  MomentTrajectory traj;
  traj.p = 2.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.01 * i;
    traj.times.push_back(t);
    const bool inside = t >= 0.1 - 1e-12 && t <= 0.9 + 1e-12;
    traj.moments.push_back(inside ? 2.0 * std::exp(-0.4 * t) : 1e6);
    traj.stderrs.push_back(0.0);
  }
  CHECK(fit_growth_rate(traj) == doctest::Approx(-0.4).epsilon(1e-9));
}

TEST_CASE("growth-rate fit needs at least two points") {
  MomentTrajectory traj;
  traj.times = {0.5};
  traj.moments = {1.0};
  traj.stderrs = {0.0};
  CHECK_THROWS_AS(fit_growth_rate(traj), RuntimeError);
}

TEST_CASE("trajectory serializes to a plottable table") {
  MomentTrajectory traj;
  traj.times = {0.0, 0.5};
  traj.moments = {2.0, 1.25};
  traj.stderrs = {0.0, 0.125};
  CHECK(trajectory_csv(traj) == "t,moment,stderr\n0,2,0\n0.5,1.25,0.125\n");
}

TEST_CASE("record_every controls the sampling grid") {
  LimitParams params;
  params.sigma = 0.3;
  params.dim = 2;
  params.dt = 0.01;
  params.horizon = 1.0;
  params.samples = 50;
  params.record_every = 30;
  const MomentTrajectory traj = simulate_limit_standard(params, 2.0, 5);
  REQUIRE(traj.times.size() >= 3);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(1.0).epsilon(1e-12));
}

}
