#pragma once

#include <stdexcept>
#include <string>

namespace neckvitals {

/// Missing or unreadable files, malformed on-disk bytes.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Inputs that violate a documented contract (bounds, ranges, monotonicity).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerically degenerate inputs: zero variance, rank loss, collapsed moments.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace neckvitals
