#include "cbo/harness.hpp"

#include "cbo/errors.hpp"
#include "cbo/objectives.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace cbo::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v == "inf" || v == "infinity" || v == "infinite") return kInf;
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError(key + ": not a number: '" + raw + "'");
  }
}

long long parse_int(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError(key + ": not an integer: '" + raw + "'");
  }
}

std::vector<std::string> split_commas(const std::string& raw) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(raw);
  while (std::getline(in, cur, ',')) parts.push_back(trim(cur));
  if (parts.empty()) parts.push_back(trim(raw));
  return parts;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& p : split_commas(raw)) {
    if (p.empty()) throw ConfigError(key + ": empty list entry");
    out.push_back(parse_double(key, p));
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& raw) {
  std::vector<int> out;
  for (const auto& p : split_commas(raw)) {
    if (p.empty()) throw ConfigError(key + ": empty list entry");
    out.push_back(static_cast<int>(parse_int(key, p)));
  }
  return out;
}

// Scalar entries broadcast to a constant vector of length dim.
Eigen::VectorXd parse_vector(const std::string& key, const std::string& raw, Eigen::Index dim) {
  const std::vector<double> vals = parse_double_list(key, raw);
  if (vals.size() == 1) return Eigen::VectorXd::Constant(dim, vals[0]);
  if (static_cast<Eigen::Index>(vals.size()) != dim)
    throw ConfigError(key + ": expected 1 or dim entries, got " + std::to_string(vals.size()));
  return Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// Success radius shared by the bundled protocols. Runs count as successful
// when the final ensemble mean lands within this distance of the minimizer.
const double kReproductionTolerance = 0.3;

}  // namespace

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  cfg.preset = name;
  cfg.cbo.lambda = 1.0;
  cfg.cbo.alpha = 1e5;
  cfg.cbo.dt = 0.02;
  cfg.cbo.trunc_m = kInf;
  cfg.cbo.proj_r = kInf;
  cfg.tolerance = kReproductionTolerance;
  cfg.repetitions = 1000;
  if (name == "isotropic-table2" || name == "isotropic-table3") {
    cfg.cbo.sigma = 0.3;
    cfg.cbo.n_steps = 200;
    cfg.cbo.noise_mode = NoiseMode::Isotropic;
    cfg.cbo.init = {Eigen::VectorXd::Zero(15), 1.0};
  } else if (name == "anisotropic-table4") {
    cfg.cbo.sigma = 5.0;
    cfg.cbo.n_steps = 1000;
    cfg.cbo.noise_mode = NoiseMode::Anisotropic;
    cfg.cbo.init = {Eigen::VectorXd::Zero(20), 100.0};
  } else if (name == "anisotropic-table5") {
    cfg.cbo.sigma = 1.0;
    cfg.cbo.n_steps = 200;
    cfg.cbo.noise_mode = NoiseMode::Anisotropic;
    cfg.cbo.init = {Eigen::VectorXd::Zero(15), 1.0};
  } else if (name == "fig1") {
    cfg.cbo.sigma = 1.0;
    cfg.cbo.dt = 0.01;
    cfg.cbo.n_steps = 5000;
    cfg.cbo.n_particles = 100;
    cfg.cbo.noise_mode = NoiseMode::Isotropic;
    cfg.cbo.init = {Eigen::VectorXd::Ones(4), 2000.0};
    cfg.repetitions = 100;
  } else {
    throw ConfigError("preset: unknown name '" + name +
                      "', valid: isotropic-table2 isotropic-table3 anisotropic-table4 anisotropic-table5 fig1");
  }
}

void ExperimentConfig::validate() const {
  if (objective.empty()) throw ConfigError("objective: required");
  if (repetitions < 1) throw ConfigError("repetitions: must be >= 1");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance: must be positive");
  cbo.validate();
  if (shift.size() != 0 && shift.size() != dim()) throw ConfigError("shift: length must equal dim");
  for (double s : sweep.sigma_values)
    if (!(s >= 0.0)) throw ConfigError("sweep_sigma: must be nonnegative");
  for (double m : sweep.m_values)
    if (!(m > 0.0)) throw ConfigError("sweep_m: must be positive (inf allowed)");
  for (int n : sweep.n_values)
    if (n < 1) throw ConfigError("sweep_n: must be >= 1");
  for (int k : sweep.k_values)
    if (k < 0) throw ConfigError("sweep_k: must be >= 0");
}

ObjectiveSpec ExperimentConfig::objective_spec() const {
  return make_objective(objective, dim(), shift);
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": missing key");
    if (value.empty()) throw ConfigError(key + ": missing value");
    entries.emplace_back(std::move(key), std::move(value));
  }

  auto find_value = [&](const char* key) -> const std::string* {
    const std::string* found = nullptr;
    for (const auto& [k, v] : entries)
      if (k == key) found = &v;  // last occurrence wins
    return found;
  };

  ExperimentConfig cfg;
  if (const auto* preset = find_value("preset")) apply_preset(cfg, *preset);

  // dim first: vector-valued keys broadcast against it.
  Eigen::Index dim = cfg.cbo.init.mean.size();
  if (const auto* v = find_value("dim")) {
    dim = static_cast<Eigen::Index>(parse_int("dim", *v));
    if (dim < 1) throw ConfigError("dim: must be >= 1");
    if (cfg.cbo.init.mean.size() != dim)
      cfg.cbo.init.mean = Eigen::VectorXd::Zero(dim);
  }
  if (dim < 1) throw ConfigError("dim: required (directly or via preset)");

  static const char* known[] = {"preset", "dim", "objective", "shift", "lambda", "sigma", "alpha",
                                "dt", "trunc_m", "m", "proj_r", "r", "proj_center", "noise",
                                "n_particles", "n", "n_steps", "k", "init_mean", "init_variance",
                                "repetitions", "reps", "tolerance", "root_seed", "seed",
                                "sweep_sigma", "sweep_m", "sweep_n", "sweep_k"};
  for (const auto& [key, value] : entries) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError("unknown key: " + key);
    if (key == "preset" || key == "dim") continue;
    if (key == "objective") cfg.objective = lower(value);
    else if (key == "shift") cfg.shift = parse_vector(key, value, dim);
    else if (key == "lambda") cfg.cbo.lambda = parse_double(key, value);
    else if (key == "sigma") cfg.cbo.sigma = parse_double(key, value);
    else if (key == "alpha") cfg.cbo.alpha = parse_double(key, value);
    else if (key == "dt") cfg.cbo.dt = parse_double(key, value);
    else if (key == "trunc_m" || key == "m") cfg.cbo.trunc_m = parse_double(key, value);
    else if (key == "proj_r" || key == "r") cfg.cbo.proj_r = parse_double(key, value);
    else if (key == "proj_center") cfg.cbo.proj_center = parse_vector(key, value, dim);
    else if (key == "noise") {
      const std::string v = lower(value);
      if (v == "isotropic") cfg.cbo.noise_mode = NoiseMode::Isotropic;
      else if (v == "anisotropic") cfg.cbo.noise_mode = NoiseMode::Anisotropic;
      else throw ConfigError("noise: expected isotropic or anisotropic");
    }
    else if (key == "n_particles" || key == "n") cfg.cbo.n_particles = static_cast<int>(parse_int(key, value));
    else if (key == "n_steps" || key == "k") cfg.cbo.n_steps = static_cast<int>(parse_int(key, value));
    else if (key == "init_mean") cfg.cbo.init.mean = parse_vector(key, value, dim);
    else if (key == "init_variance") cfg.cbo.init.variance_per_coord = parse_double(key, value);
    else if (key == "repetitions" || key == "reps") cfg.repetitions = static_cast<int>(parse_int(key, value));
    else if (key == "tolerance") cfg.tolerance = parse_double(key, value);
    else if (key == "root_seed" || key == "seed") cfg.root_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "sweep_sigma") cfg.sweep.sigma_values = parse_double_list(key, value);
    else if (key == "sweep_m") cfg.sweep.m_values = parse_double_list(key, value);
    else if (key == "sweep_n") cfg.sweep.n_values = parse_int_list(key, value);
    else if (key == "sweep_k") cfg.sweep.k_values = parse_int_list(key, value);
  }

  if (cfg.cbo.init.mean.size() != dim) throw ConfigError("init_mean: length must equal dim");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace cbo::harness
