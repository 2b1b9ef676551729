#pragma once

#include <stdexcept>
#include <string>

namespace modnet {

// Bad or degenerate input data (malformed CSV, zero-variance column,
// out-of-range variable index, ...). Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (solver non-convergence, KKT violation, sampler
// abort on a non-normalizable model, singular design). CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace modnet
