#pragma once

#include <stdexcept>
#include <string>

namespace cbo {

// Invalid parameters, malformed config files, unknown names. Maps to CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Failures while executing a valid configuration. Maps to CLI exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  explicit RuntimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cbo
