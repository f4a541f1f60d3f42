#pragma once

#include "cbo/core.hpp"
#include "cbo/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cbo::harness {

// Swept parameter lists; an empty list means the parameter is not swept.
struct SweepAxes {
  std::vector<double> sigma_values;
  std::vector<double> m_values;
  std::vector<int> n_values;
  std::vector<int> k_values;

  bool any() const {
    return !sigma_values.empty() || !m_values.empty() || !n_values.empty() || !k_values.empty();
  }
};

struct ExperimentConfig {
  std::string preset;     // name of the applied preset, if any
  std::string objective;  // registry name, required
  CboParams cbo;
  Eigen::VectorXd shift;  // optional objective shift
  int repetitions = 100;
  double tolerance = 0.1;
  std::uint64_t root_seed = 42;
  SweepAxes sweep;

  Eigen::Index dim() const { return cbo.dim(); }
  void validate() const;
  ObjectiveSpec objective_spec() const;
};

// Fills cfg with a named protocol preset. Valid names: isotropic-table2,
// isotropic-table3, anisotropic-table4, anisotropic-table5, fig1.
void apply_preset(ExperimentConfig& cfg, const std::string& name);

// Parses the flat key = value config format (see README for the schema).
// A `preset` key is applied first; remaining keys override its values.
ExperimentConfig parse_config(const std::string& text);

// parse_config on the file contents; errors mention the path.
ExperimentConfig load_config(const std::string& path);

struct SuccessEstimate {
  double rate = 0.0;
  int runs = 0;
  int successes = 0;
  int diverged = 0;  // runs that hit non-finite values (counted as failures)
  std::pair<double, double> wilson_ci_95{0.0, 0.0};
};

// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(int successes, int runs);

// Runs cfg.repetitions independent optimizations with derived seeds and
// counts successes. Deterministic for a fixed root_seed, independent of the
// worker count.
SuccessEstimate success_rate(const ExperimentConfig& cfg);

struct SweepCell {
  double sigma = 0.0;
  double m = 0.0;
  int n = 0;
  int k = 0;
  SuccessEstimate estimate;
  std::string error;  // nonempty if this cell failed; other cells still run
};

struct SweepResult {
  SweepAxes axes;
  std::vector<SweepCell> cells;  // canonical order: sigma, then m, n, k
  std::string config_hash;
  std::uint64_t root_seed = 0;
  double wall_time_s = 0.0;  // informational only, never serialized
};

// Evaluates success_rate on every grid cell. Per-cell seeds are derived from
// the parameter values themselves, so reordering axis lists permutes cells
// without changing any estimate.
SweepResult run_sweep(const ExperimentConfig& cfg);

struct TableRow {
  std::string objective;
  double m = 0.0;
  int n = 0;
  int k = 0;
  SuccessEstimate estimate;
};

struct TableReport {
  std::string preset;
  std::vector<TableRow> rows;
  std::string config_hash;
  std::uint64_t root_seed = 0;
  double wall_time_s = 0.0;  // informational only, never serialized
};

// Bundled success-rate protocols over benchmark grids (presets table2,
// table3, table4, table5). repetitions <= 0 selects the preset default 1000.
TableReport run_table(const std::string& preset, int repetitions, std::uint64_t root_seed);

// Bundled sigma x M phase-diagram protocols (presets fig1a, fig1b).
// repetitions <= 0 selects the preset default 100.
SweepResult run_phase(const std::string& preset, int repetitions, std::uint64_t root_seed);

enum class ReportFormat { Csv, Json };

ReportFormat parse_format(const std::string& name);

// Deterministic report bytes. Infinite values print as inf (JSON: "inf").
std::string emit_csv(const SuccessEstimate& e);
std::string emit_json(const SuccessEstimate& e);
std::string emit_csv(const SweepResult& r);
std::string emit_json(const SweepResult& r);
std::string emit_csv(const TableReport& r);
std::string emit_json(const TableReport& r);

// Writes a report to a file, or to stdout when path is "-" or empty.
void emit_report(const SuccessEstimate& e, ReportFormat format, const std::string& path);
void emit_report(const SweepResult& r, ReportFormat format, const std::string& path);
void emit_report(const TableReport& r, ReportFormat format, const std::string& path);

// FNV-1a hash of the canonical config serialization (seed excluded).
std::string config_hash(const ExperimentConfig& cfg);

// Seed stream key for one experiment cell, derived from parameter values.
std::uint64_t cell_key(const std::string& objective, double sigma, double m, int n, int k);

}  // namespace cbo::harness
