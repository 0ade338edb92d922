#pragma once

#include <stdexcept>
#include <string>

namespace stew {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numerical routine failed to converge. Carries the last bracket when one exists.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double lo = 0.0, double hi = 0.0)
      : std::runtime_error(what), lo_(lo), hi_(hi) {}

  double bracket_lo() const noexcept { return lo_; }
  double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

// Bad or unknown configuration value. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace stew
