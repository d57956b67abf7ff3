#pragma once

#include <stdexcept>
#include <string>

namespace evsim {

// Offered load at or beyond service capacity (lambda >= c * mu).
class UnstableLoadError : public std::domain_error {
 public:
  explicit UnstableLoadError(const std::string& what) : std::domain_error(what) {}
};

// Instance exceeds the enumeration bound of an exhaustive oracle.
class SizeLimitError : public std::runtime_error {
 public:
  explicit SizeLimitError(const std::string& what) : std::runtime_error(what) {}
};

// An EV ended up with no feasible station arc even after the fallback rule.
class InfeasibleEvError : public std::runtime_error {
 public:
  explicit InfeasibleEvError(const std::string& what) : std::runtime_error(what) {}
};

// A user-supplied cost CDF failed a monotonicity / range spot-check.
class InvalidCdfError : public std::invalid_argument {
 public:
  explicit InvalidCdfError(const std::string& what) : std::invalid_argument(what) {}
};

// User-facing configuration problem; message names the offending file/key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evsim
