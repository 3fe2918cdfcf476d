#pragma once

#include <stdexcept>
#include <string>

namespace kms {

// Validation failures (bad documents, unknown ids, malformed flags) use
// std::invalid_argument. The types below mark well-posed computations whose
// mathematical answer is "no" or that did not converge.

// No solution exists under the requested constraints (e.g. beta below the
// feasibility threshold).
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// An iteration failed to converge within its budget.
struct NonConvergenceError : std::runtime_error {
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A computation needed data beyond the truncation frontier.
struct FrontierError : std::runtime_error {
  explicit FrontierError(const std::string& what) : std::runtime_error(what) {}
};

// The graph has no cycles, so loop-based quantities are undefined.
struct EmptyNonWanderingError : std::runtime_error {
  explicit EmptyNonWanderingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kms
