#ifndef SEGAUDIT_COMMON_HPP
#define SEGAUDIT_COMMON_HPP

#include <stdexcept>
#include <string>

namespace segaudit {

inline constexpr const char* kVersion = "0.1.0";

// Bad input data or configuration. CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / stream failure. CLI maps this to exit code 2.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace segaudit

#endif
