#include "cbo/objectives.hpp"

#include "cbo/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace cbo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double ackley(const Eigen::ArrayXd& z) {
  const double d = static_cast<double>(z.size());
  const double rms = std::sqrt(z.square().sum() / d);
  const double mc = (kTwoPi * z).cos().sum() / d;
  return -20.0 * std::exp(-0.2 * rms) - std::exp(mc) + 20.0 + std::numbers::e;
}

double griewank(const Eigen::ArrayXd& z) {
  const Eigen::ArrayXd idx = Eigen::ArrayXd::LinSpaced(z.size(), 1.0, static_cast<double>(z.size()));
  return 1.0 + z.square().sum() / 4000.0 - (z / idx).cos().prod();
}

double rastrigin(const Eigen::ArrayXd& z) {
  return 10.0 * static_cast<double>(z.size()) + (z.square() - 10.0 * (kTwoPi * z).cos()).sum();
}

double alpine(const Eigen::ArrayXd& z) {
  return 10.0 * (z * (10.0 * z).sin() - 0.1 * z).abs().sum();
}

double salomon(const Eigen::ArrayXd& z) {
  const double r = std::sqrt(z.square().sum());
  return 1.0 - std::cos(200.0 * std::numbers::pi * r) + 10.0 * r;
}

double ackley_fig1(const Eigen::ArrayXd& z) {
  const double d = static_cast<double>(z.size());
  const double r = std::sqrt(z.square().sum());
  return -20.0 * std::exp(-0.2 * r / std::sqrt(d)) - std::exp((kTwoPi * z).cos().sum() / d);
}

double rastrigin_fig1(const Eigen::ArrayXd& z) {
  return (z.square() + 2.5 * (1.0 - (kTwoPi * z).cos())).sum();
}

struct Entry {
  const char* name;
  double (*fn)(const Eigen::ArrayXd&);
  double min_value;
};

const Entry kRegistry[] = {
    {"ackley", ackley, 0.0},
    {"griewank", griewank, 0.0},
    {"rastrigin", rastrigin, 0.0},
    {"alpine", alpine, 0.0},
    {"salomon", salomon, 0.0},
    {"ackley_fig1", ackley_fig1, -20.0 - std::numbers::e},
    {"rastrigin_fig1", rastrigin_fig1, 0.0},
};

}  // namespace

const std::vector<std::string>& objective_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : kRegistry) v.emplace_back(e.name);
    return v;
  }();
  return names;
}

ObjectiveSpec make_objective(const std::string& name, Eigen::Index dim, const Eigen::VectorXd& shift) {
  if (dim < 1) throw ConfigError("dim: must be >= 1");
  const Entry* entry = nullptr;
  for (const auto& e : kRegistry)
    if (name == e.name) entry = &e;
  if (!entry) {
    std::ostringstream msg;
    msg << "objective: unknown name '" << name << "', valid names:";
    for (const auto& e : kRegistry) msg << " " << e.name;
    throw ConfigError(msg.str());
  }
  Eigen::VectorXd s = shift.size() == 0 ? Eigen::VectorXd::Zero(dim) : shift;
  if (s.size() != dim) throw ConfigError("shift: length must equal dim");

  ObjectiveSpec spec;
  spec.name = name;
  spec.dim = dim;
  spec.shift = s;
  spec.minimizer = s;
  spec.min_value = entry->min_value;
  auto fn = entry->fn;
  spec.eval = [fn, s](const Eigen::VectorXd& v) -> double {
    return fn((v - s).array());
  };
  return spec;
}

Eigen::VectorXd eval_batch(const ObjectiveSpec& spec, const Ensemble& ensemble) {
  if (ensemble.dim() != spec.dim) throw ConfigError("ensemble dim does not match objective dim");
  const Eigen::Index n = ensemble.n_particles();
  Eigen::VectorXd values(n);
  for (Eigen::Index i = 0; i < n; ++i) values[i] = spec.eval(ensemble.positions.row(i).transpose());
  return values;
}

}  // namespace cbo
