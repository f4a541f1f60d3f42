#include "cbo/harness.hpp"

#include "cbo/errors.hpp"
#include "cbo/parallel.hpp"
#include "cbo/rng.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <vector>

namespace cbo::harness {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xCBF29CE484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

std::uint64_t cell_key(const std::string& objective, double sigma, double m, int n, int k) {
  std::uint64_t h = fnv1a(objective.data(), objective.size());
  h = mix64(h ^ std::bit_cast<std::uint64_t>(sigma));
  h = mix64(h ^ std::bit_cast<std::uint64_t>(m));
  h = mix64(h ^ static_cast<std::uint64_t>(n));
  h = mix64(h ^ static_cast<std::uint64_t>(k));
  return h;
}

std::pair<double, double> wilson_interval(int successes, int runs) {
  if (runs < 1) throw ConfigError("runs: must be >= 1");
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(runs);
  const double ph = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (ph + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Rounding can push the bounds a few ulps past ph at 0/n and n/n; the
  // interval must contain the point estimate.
  return {std::max(0.0, std::min(center - half, ph)), std::min(1.0, std::max(center + half, ph))};
}

SuccessEstimate success_rate(const ExperimentConfig& cfg) {
  cfg.validate();
  const ObjectiveSpec spec = cfg.objective_spec();
  const std::uint64_t key =
      cell_key(cfg.objective, cfg.cbo.sigma, cfg.cbo.trunc_m, cfg.cbo.n_particles, cfg.cbo.n_steps);

  const int reps = cfg.repetitions;
  std::vector<unsigned char> ok(reps, 0), div(reps, 0);
  RunOptions opts;
  opts.tolerance = cfg.tolerance;

  parallel_for(reps, thread_budget(), [&](int rep) {
    try {
      const RunOutcome out =
          run(cfg.cbo, spec, derive_seed(cfg.root_seed, key, static_cast<std::uint64_t>(rep)), opts);
      ok[rep] = out.success ? 1 : 0;
      div[rep] = out.diverged ? 1 : 0;
    } catch (const std::exception& e) {
      throw RuntimeError("run " + std::to_string(rep) + ": " + e.what());
    }
  });

  SuccessEstimate est;
  est.runs = reps;
  for (int i = 0; i < reps; ++i) {
    est.successes += ok[i];
    est.diverged += div[i];
  }
  est.rate = static_cast<double>(est.successes) / static_cast<double>(reps);
  est.wilson_ci_95 = wilson_interval(est.successes, reps);
  return est;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const double t_start = now_seconds();

  auto or_single = [](auto list, auto base) {
    if (list.empty()) list.push_back(base);
    return list;
  };
  const std::vector<double> sigmas = or_single(cfg.sweep.sigma_values, cfg.cbo.sigma);
  const std::vector<double> ms = or_single(cfg.sweep.m_values, cfg.cbo.trunc_m);
  const std::vector<int> ns = or_single(cfg.sweep.n_values, cfg.cbo.n_particles);
  const std::vector<int> ks = or_single(cfg.sweep.k_values, cfg.cbo.n_steps);

  SweepResult result;
  result.axes = cfg.sweep;
  result.config_hash = config_hash(cfg);
  result.root_seed = cfg.root_seed;

  for (double sigma : sigmas)
    for (double m : ms)
      for (int n : ns)
        for (int k : ks) {
          SweepCell cell;
          cell.sigma = sigma;
          cell.m = m;
          cell.n = n;
          cell.k = k;
          ExperimentConfig point = cfg;
          point.sweep = {};
          point.cbo.sigma = sigma;
          point.cbo.trunc_m = m;
          point.cbo.n_particles = n;
          point.cbo.n_steps = k;
          try {
            cell.estimate = success_rate(point);
          } catch (const std::exception& e) {
            cell.error = e.what();
          }
          result.cells.push_back(std::move(cell));
        }

  result.wall_time_s = now_seconds() - t_start;
  return result;
}

namespace {

struct TableProtocol {
  const char* preset_key;          // ExperimentConfig preset applied to every cell
  std::vector<std::string> objectives;
  std::vector<double> ms;
  std::vector<int> ns;
  std::vector<int> ks;
};

TableProtocol table_protocol(const std::string& name) {
  if (name == "table2")
    return {"isotropic-table2", {"ackley", "griewank", "salomon"}, {1.0, kInf},
            {150, 300, 600, 900, 1200}, {200}};
  if (name == "table3")
    return {"isotropic-table3", {"rastrigin", "alpine"}, {1.0, kInf},
            {300, 600, 900, 1200, 1500}, {200, 500}};
  if (name == "table4")
    return {"anisotropic-table4", {"rastrigin", "ackley", "griewank", "salomon"}, {1.0, kInf},
            {75, 150, 300, 600, 900}, {1000}};
  if (name == "table5")
    return {"anisotropic-table5", {"alpine"}, {1.0, kInf},
            {300, 600, 900, 1200, 1500}, {200, 500, 1000}};
  throw ConfigError("preset: unknown table '" + name + "', valid: table2 table3 table4 table5");
}

}  // namespace

TableReport run_table(const std::string& preset, int repetitions, std::uint64_t root_seed) {
  const TableProtocol proto = table_protocol(preset);
  const double t_start = now_seconds();

  ExperimentConfig base;
  apply_preset(base, proto.preset_key);
  base.root_seed = root_seed;
  if (repetitions > 0) base.repetitions = repetitions;

  TableReport report;
  report.preset = preset;
  report.root_seed = root_seed;

  for (const auto& objective : proto.objectives)
    for (int k : proto.ks)
      for (double m : proto.ms)
        for (int n : proto.ns) {
          ExperimentConfig point = base;
          point.objective = objective;
          point.cbo.trunc_m = m;
          point.cbo.n_particles = n;
          point.cbo.n_steps = k;
          TableRow row;
          row.objective = objective;
          row.m = m;
          row.n = n;
          row.k = k;
          row.estimate = success_rate(point);
          report.rows.push_back(std::move(row));
        }

  ExperimentConfig hash_cfg = base;
  hash_cfg.objective = proto.objectives.front();
  report.config_hash = config_hash(hash_cfg);
  report.wall_time_s = now_seconds() - t_start;
  return report;
}

SweepResult run_phase(const std::string& preset, int repetitions, std::uint64_t root_seed) {
  ExperimentConfig cfg;
  apply_preset(cfg, "fig1");
  if (preset == "fig1a") cfg.objective = "ackley_fig1";
  else if (preset == "fig1b") cfg.objective = "rastrigin_fig1";
  else throw ConfigError("preset: unknown phase '" + preset + "', valid: fig1a fig1b");
  cfg.root_seed = root_seed;
  if (repetitions > 0) cfg.repetitions = repetitions;
  cfg.sweep.sigma_values = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  cfg.sweep.m_values = {0.1, 0.25, 0.5, 1.0, 2.0, 4.0, kInf};
  return run_sweep(cfg);
}

}  // namespace cbo::harness
