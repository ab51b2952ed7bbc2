#pragma once

#include <stdexcept>
#include <string>

namespace lem {

/// Bad configuration or inconsistent inputs (wrong grid, invalid parameters).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Query outside the hold-all domain or violated geometric precondition.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: singular system, CFL violation, incompatible data.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lem
