#pragma once

#include <stdexcept>
#include <string>

namespace fracsurf {

// Invalid argument or out-of-domain input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The requested integral is infinite (e.g. overlapping interaction sets).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tangential window/boundary contact and similar measure-zero situations.
class DegenerateConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An integrand produced NaN. The message names the evaluation point.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration; `field` is a JSON pointer-like path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace fracsurf
