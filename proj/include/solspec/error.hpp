#pragma once

#include <stdexcept>
#include <string>

namespace solspec {

/// Base error for all library failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Raised on malformed configuration or input files.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Raised when an iterative or dense solver fails to converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& msg, double best_residual)
      : Error(msg), best_residual(best_residual) {}
  double best_residual;
};

}  // namespace solspec
