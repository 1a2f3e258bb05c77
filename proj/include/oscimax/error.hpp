#pragma once

#include <stdexcept>
#include <string>

namespace oscimax {

// Argument outside the domain where a formula is defined (t = 0 for negative
// Laurent powers, |t| >= |x| for the binomial expansion, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Caller broke a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed phase / function / search specification.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace oscimax
