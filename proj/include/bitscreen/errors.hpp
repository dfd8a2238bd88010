#pragma once

#include <stdexcept>
#include <string>

namespace bitscreen {

// Bad data: unreadable files, non-finite entries, dimension mismatches. CLI exit 2.
class input_error : public std::runtime_error {
 public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad options or config files. CLI exit 3.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown (non-positive pivot, vanished residual, R^2 >= 1). CLI exit 1.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace bitscreen
