#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace conveyor {

// Bad user input: malformed config, unknown keys, missing SI anchors.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Requested operation has no solution in its admissible domain
// (transport faster than the classical bound, unreachable trap position, ...).
class InfeasibleError : public std::domain_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::domain_error(what) {}
};

// Iterative scheme failed to converge within its budget.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Sampling too coarse for the requested analysis.
class ResolutionError : public std::runtime_error {
 public:
  explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

// Feedback iteration diverged; carries the residual history for diagnosis.
class InstabilityError : public std::runtime_error {
 public:
  InstabilityError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

}  // namespace conveyor
