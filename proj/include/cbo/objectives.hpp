#pragma once

#include "cbo/types.hpp"

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace cbo {

// A named benchmark with its known minimizer and minimum value.
struct ObjectiveSpec {
  std::string name;
  Eigen::Index dim = 0;
  Eigen::VectorXd minimizer;
  double min_value = 0.0;
  std::function<double(const Eigen::VectorXd&)> eval;
  Eigen::VectorXd shift;  // landscape translation; minimizer == shift for all benchmarks here
};

// Registered names, in registry order.
const std::vector<std::string>& objective_names();

// Builds a benchmark by name. An optional shift translates the landscape so
// the minimizer moves to `shift`. Unknown names raise ConfigError listing the
// valid ones.
ObjectiveSpec make_objective(const std::string& name, Eigen::Index dim,
                             const Eigen::VectorXd& shift = Eigen::VectorXd());

// values[i] = spec.eval(positions.row(i)).
Eigen::VectorXd eval_batch(const ObjectiveSpec& spec, const Ensemble& ensemble);

}  // namespace cbo
