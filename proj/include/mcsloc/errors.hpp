#pragma once

#include <stdexcept>
#include <string>

namespace mcsloc {

// Invalid configuration, argument out of domain, inconsistent dataset.
// CLI exit code 2.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file on disk (truncated payload, missing sidecar, bad container).
// CLI exit code 3.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values where finite ones are required (diverged training,
// NaN gradients). CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mcsloc
