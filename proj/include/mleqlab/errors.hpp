#ifndef MLEQLAB_ERRORS_HPP
#define MLEQLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mleq {

// Malformed scenario/query input.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Problem instance exceeds the exhaustive-enumeration ceiling.
struct SizeError : std::runtime_error {
  explicit SizeError(const std::string& what) : std::runtime_error(what) {}
};

// Search or sampling budget exceeded.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical routine failed to reach its required tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Noisy-observation model is undefined (a history has zero long-run mass).
struct ModelError : std::runtime_error {
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mleq

#endif
