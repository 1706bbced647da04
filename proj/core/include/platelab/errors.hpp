#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace platelab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : Error {
  using Error::Error;
};

struct AssemblyError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// Thrown on non-convergence; carries the best residuals reached so callers
// can report how far the solve got.
struct SolverError : Error {
  std::vector<double> best_residuals;
  explicit SolverError(const std::string& msg, std::vector<double> residuals = {})
      : Error(msg), best_residuals(std::move(residuals)) {}
};

}  // namespace platelab
