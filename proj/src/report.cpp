#include "cbo/harness.hpp"

#include "cbo/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

namespace cbo::harness {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// JSON numbers cannot be infinite; infinities are emitted as strings.
json jnum(double v) {
  if (std::isinf(v) || std::isnan(v)) return json(fmt(v));
  return json(v);
}

json to_json(const SuccessEstimate& e) {
  json j;
  j["rate"] = jnum(e.rate);
  j["runs"] = e.runs;
  j["successes"] = e.successes;
  j["diverged"] = e.diverged;
  j["ci_lo"] = jnum(e.wilson_ci_95.first);
  j["ci_hi"] = jnum(e.wilson_ci_95.second);
  return j;
}

json axis_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) arr.push_back(jnum(x));
  return arr;
}

void append_estimate_csv(std::string& out, const SuccessEstimate& e, bool errored) {
  if (errored) {
    out += "nan,0,nan,nan";
    return;
  }
  out += fmt(e.rate);
  out += ',';
  out += std::to_string(e.runs);
  out += ',';
  out += fmt(e.wilson_ci_95.first);
  out += ',';
  out += fmt(e.wilson_ci_95.second);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  throw ConfigError("format: expected csv or json, got '" + name + "'");
}

std::string emit_csv(const SuccessEstimate& e) {
  std::string out = "rate,runs,ci_lo,ci_hi\n";
  append_estimate_csv(out, e, false);
  out += '\n';
  return out;
}

std::string emit_json(const SuccessEstimate& e) { return dump(to_json(e)); }

std::string emit_csv(const SweepResult& r) {
  std::string out = "sigma,m,n,k,rate,runs,ci_lo,ci_hi\n";
  for (const auto& c : r.cells) {
    out += fmt(c.sigma);
    out += ',';
    out += fmt(c.m);
    out += ',';
    out += std::to_string(c.n);
    out += ',';
    out += std::to_string(c.k);
    out += ',';
    append_estimate_csv(out, c.estimate, !c.error.empty());
    out += '\n';
  }
  return out;
}

std::string emit_json(const SweepResult& r) {
  json j;
  json axes;
  axes["sigma"] = axis_json(r.axes.sigma_values);
  axes["m"] = axis_json(r.axes.m_values);
  axes["n"] = r.axes.n_values;
  axes["k"] = r.axes.k_values;
  j["axes"] = std::move(axes);
  json cells = json::array();
  for (const auto& c : r.cells) {
    json jc;
    jc["sigma"] = jnum(c.sigma);
    jc["m"] = jnum(c.m);
    jc["n"] = c.n;
    jc["k"] = c.k;
    if (c.error.empty()) {
      json est = to_json(c.estimate);
      jc.update(est);
    } else {
      jc["error"] = c.error;
    }
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  j["metadata"] = {{"config_hash", r.config_hash}, {"root_seed", r.root_seed}};
  return dump(j);
}

std::string emit_csv(const TableReport& r) {
  std::string out = "objective,m,n,k,rate,runs,ci_lo,ci_hi\n";
  for (const auto& row : r.rows) {
    out += row.objective;
    out += ',';
    out += fmt(row.m);
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.k);
    out += ',';
    append_estimate_csv(out, row.estimate, false);
    out += '\n';
  }
  return out;
}

std::string emit_json(const TableReport& r) {
  json j;
  j["preset"] = r.preset;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["objective"] = row.objective;
    jr["m"] = jnum(row.m);
    jr["n"] = row.n;
    jr["k"] = row.k;
    jr.update(to_json(row.estimate));
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  j["metadata"] = {{"config_hash", r.config_hash}, {"root_seed", r.root_seed}};
  return dump(j);
}

namespace {

void write_bytes(const std::string& bytes, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeError("cannot write report to " + path);
  out << bytes;
  out.flush();
  if (!out) throw RuntimeError("cannot write report to " + path);
}

}  // namespace

void emit_report(const SuccessEstimate& e, ReportFormat format, const std::string& path) {
  write_bytes(format == ReportFormat::Csv ? emit_csv(e) : emit_json(e), path);
}

void emit_report(const SweepResult& r, ReportFormat format, const std::string& path) {
  write_bytes(format == ReportFormat::Csv ? emit_csv(r) : emit_json(r), path);
}

void emit_report(const TableReport& r, ReportFormat format, const std::string& path) {
  write_bytes(format == ReportFormat::Csv ? emit_csv(r) : emit_json(r), path);
}

namespace {

void hash_field(std::string& s, const char* key, const std::string& value) {
  s += key;
  s += '=';
  s += value;
  s += ';';
}

std::string vec_str(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt(v[i]);
  }
  return s;
}

template <typename T>
std::string list_str(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_same_v<T, double>) s += fmt(v[i]);
    else s += std::to_string(v[i]);
  }
  return s;
}

std::uint64_t fnv1a_str(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

std::string config_hash(const ExperimentConfig& cfg) {
  std::string s;
  hash_field(s, "objective", cfg.objective);
  hash_field(s, "dim", std::to_string(cfg.dim()));
  hash_field(s, "shift", vec_str(cfg.shift));
  hash_field(s, "lambda", fmt(cfg.cbo.lambda));
  hash_field(s, "sigma", fmt(cfg.cbo.sigma));
  hash_field(s, "alpha", fmt(cfg.cbo.alpha));
  hash_field(s, "dt", fmt(cfg.cbo.dt));
  hash_field(s, "trunc_m", fmt(cfg.cbo.trunc_m));
  hash_field(s, "proj_r", fmt(cfg.cbo.proj_r));
  hash_field(s, "proj_center", vec_str(cfg.cbo.proj_center));
  hash_field(s, "noise", cfg.cbo.noise_mode == NoiseMode::Anisotropic ? "anisotropic" : "isotropic");
  hash_field(s, "n_particles", std::to_string(cfg.cbo.n_particles));
  hash_field(s, "n_steps", std::to_string(cfg.cbo.n_steps));
  hash_field(s, "init_mean", vec_str(cfg.cbo.init.mean));
  hash_field(s, "init_variance", fmt(cfg.cbo.init.variance_per_coord));
  hash_field(s, "repetitions", std::to_string(cfg.repetitions));
  hash_field(s, "tolerance", fmt(cfg.tolerance));
  hash_field(s, "sweep_sigma", list_str(cfg.sweep.sigma_values));
  hash_field(s, "sweep_m", list_str(cfg.sweep.m_values));
  hash_field(s, "sweep_n", list_str(cfg.sweep.n_values));
  hash_field(s, "sweep_k", list_str(cfg.sweep.k_values));

  const std::uint64_t h = fnv1a_str(s);
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 0; i < 16; ++i) buf[i] = hex[(h >> (60 - 4 * i)) & 0xF];
  buf[16] = '\0';
  return std::string(buf);
}

}  // namespace cbo::harness
