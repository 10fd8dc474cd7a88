#pragma once

#include <stdexcept>
#include <string>

namespace tdroc {

/// Malformed or inconsistent input data (bad schema, broken interval chains,
/// invalid parameters). The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// The data are well-formed but the requested estimate is not defined on
/// them (no events, degenerate case/control split, singular information).
/// The CLI maps this to exit code 3.
class EstimationError : public std::runtime_error {
 public:
  explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tdroc
