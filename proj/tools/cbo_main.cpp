#include "cbo/errors.hpp"
#include "cbo/harness.hpp"
#include "cbo/meanfield.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using cbo::harness::ExperimentConfig;
using cbo::harness::ReportFormat;

struct CommonOpts {
  std::string out = "-";
  std::string format = "csv";
  std::uint64_t seed = 0;
  int reps = 0;
  bool seed_set = false;
  bool reps_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out, "Report path, - for stdout")->capture_default_str();
  cmd->add_option("--format", opts.format, "Report format: csv or json")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Root seed override")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--reps", opts.reps, "Repetition count override")
      ->each([&opts](const std::string&) { opts.reps_set = true; });
}

void apply_overrides(ExperimentConfig& cfg, const CommonOpts& opts) {
  if (opts.seed_set) cfg.root_seed = opts.seed;
  if (opts.reps_set) cfg.repetitions = opts.reps;
}

void write_text(const std::string& bytes, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw cbo::RuntimeError("cannot write report to " + path);
  out << bytes;
  out.flush();
  if (!out) throw cbo::RuntimeError("cannot write report to " + path);
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus-based optimization experiments"};
  app.require_subcommand(1);

  std::string config_path;
  CommonOpts run_opts, sweep_opts, table_opts, phase_opts;

  CLI::App* run_cmd = app.add_subcommand("run", "Success rate of a single configuration");
  run_cmd->add_option("--config", config_path, "Experiment config file")->required();
  add_common(run_cmd, run_opts);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Success rates over a parameter grid");
  sweep_cmd->add_option("--config", config_path, "Experiment config file with sweep axes")->required();
  add_common(sweep_cmd, sweep_opts);

  std::string table_preset;
  CLI::App* table_cmd = app.add_subcommand("table", "Benchmark success-rate table");
  table_cmd->add_option("--preset", table_preset, "table2, table3, table4 or table5")->required();
  add_common(table_cmd, table_opts);

  std::string phase_preset;
  CLI::App* phase_cmd = app.add_subcommand("phase", "Sigma x M phase diagram");
  phase_cmd->add_option("--preset", phase_preset, "fig1a or fig1b")->required();
  add_common(phase_cmd, phase_opts);

  CLI::App* mf_cmd = app.add_subcommand("meanfield", "Limit-dynamics moment trajectory");
  std::string mf_mode;
  double mf_p = 2.0;
  cbo::meanfield::LimitParams mf;
  std::uint64_t mf_seed = 42;
  std::string mf_out = "-";
  double mf_mean = 0.0;
  int mf_record_every = 10;
  mf_cmd->add_option("--mode", mf_mode, "standard or truncated")->required();
  mf_cmd->add_option("--p", mf_p, "Moment order")->capture_default_str();
  mf_cmd->add_option("--lambda", mf.lambda, "Drift rate")->capture_default_str();
  mf_cmd->add_option("--sigma", mf.sigma, "Noise strength")->capture_default_str();
  mf_cmd->add_option("--m", mf.trunc_m, "Noise truncation level (truncated mode)");
  mf_cmd->add_option("--dim", mf.dim, "Space dimension")->capture_default_str();
  mf_cmd->add_option("--dt", mf.dt, "Time step")->capture_default_str();
  mf_cmd->add_option("--horizon", mf.horizon, "Time horizon")->capture_default_str();
  mf_cmd->add_option("--samples", mf.samples, "Trajectory count")->capture_default_str();
  mf_cmd->add_option("--variance", mf.init_variance, "Initial per-coordinate variance")->capture_default_str();
  mf_cmd->add_option("--mean", mf_mean, "Initial mean, broadcast to every coordinate")->capture_default_str();
  mf_cmd->add_option("--record-every", mf_record_every, "Record every k-th step")->capture_default_str();
  mf_cmd->add_option("--seed", mf_seed, "Root seed")->capture_default_str();
  mf_cmd->add_option("--out", mf_out, "Trajectory CSV path, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    Stopwatch watch;
    if (*run_cmd) {
      ExperimentConfig cfg = cbo::harness::load_config(config_path);
      apply_overrides(cfg, run_opts);
      const auto estimate = cbo::harness::success_rate(cfg);
      cbo::harness::emit_report(estimate, cbo::harness::parse_format(run_opts.format), run_opts.out);
    } else if (*sweep_cmd) {
      ExperimentConfig cfg = cbo::harness::load_config(config_path);
      apply_overrides(cfg, sweep_opts);
      const auto result = cbo::harness::run_sweep(cfg);
      cbo::harness::emit_report(result, cbo::harness::parse_format(sweep_opts.format), sweep_opts.out);
    } else if (*table_cmd) {
      const auto format = cbo::harness::parse_format(table_opts.format);
      const auto report = cbo::harness::run_table(
          table_preset, table_opts.reps_set ? table_opts.reps : 0,
          table_opts.seed_set ? table_opts.seed : 42);
      cbo::harness::emit_report(report, format, table_opts.out);
    } else if (*phase_cmd) {
      const auto format = cbo::harness::parse_format(phase_opts.format);
      const auto result = cbo::harness::run_phase(
          phase_preset, phase_opts.reps_set ? phase_opts.reps : 0,
          phase_opts.seed_set ? phase_opts.seed : 42);
      cbo::harness::emit_report(result, format, phase_opts.out);
    } else if (*mf_cmd) {
      if (mf_mean != 0.0) mf.init_mean = Eigen::VectorXd::Constant(mf.dim, mf_mean);
      mf.record_every = mf_record_every;
      cbo::meanfield::MomentTrajectory traj;
      if (mf_mode == "standard") {
        traj = cbo::meanfield::simulate_limit_standard(mf, mf_p, mf_seed);
        if (mf.sigma > 0.0) {
          std::cerr << "threshold exponent: "
                    << cbo::meanfield::threshold_exponent(mf.lambda, mf.sigma, mf.dim) << "\n";
        }
        std::cerr << "predicted rate: "
                  << cbo::meanfield::rate_standard(mf.lambda, mf.sigma, mf.dim, mf_p) << "\n";
        if (!traj.truncated_early) {
          std::cerr << "fitted rate: " << cbo::meanfield::fit_growth_rate(traj) << "\n";
        }
      } else if (mf_mode == "truncated") {
        traj = cbo::meanfield::simulate_limit_truncated(mf, mf_p, mf_seed);
        std::cerr << "bound at horizon: "
                  << cbo::meanfield::bound_truncated(mf.lambda, mf.sigma, mf.trunc_m, mf.dim, mf_p,
                                                     mf.horizon, traj.moments.front())
                  << "\n";
      } else {
        throw cbo::ConfigError("mode: expected standard or truncated, got '" + mf_mode + "'");
      }
      write_text(cbo::meanfield::trajectory_csv(traj), mf_out);
    }
    std::cerr << "wall time: " << watch.seconds() << "s\n";
    return 0;
  } catch (const cbo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
