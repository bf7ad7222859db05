#pragma once

#include <stdexcept>
#include <string>

namespace kicktop {

// Invalid arguments or parameters outside an operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to meet its own post-conditions
// (non-convergence, loss of positivity beyond tolerance, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Experiment configuration could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace kicktop
