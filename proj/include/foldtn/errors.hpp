#pragma once

#include <stdexcept>
#include <string>

namespace foldtn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  /// Stable machine-readable category, used in CLI error JSON.
  virtual const char* kind() const noexcept { return "error"; }
};

class DecompositionError : public Error {
 public:
  DecompositionError(long rows, long cols, const std::string& what)
      : Error(what + " (input " + std::to_string(rows) + "x" + std::to_string(cols) + ")"),
        rows_(rows),
        cols_(cols) {}
  long rows() const noexcept { return rows_; }
  long cols() const noexcept { return cols_; }
  const char* kind() const noexcept override { return "decomposition_failure"; }

 private:
  long rows_;
  long cols_;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contract_violation"; }
};

class SingularInputError : public Error {
 public:
  SingularInputError(double singular_value, const std::string& what)
      : Error(what + " (singular value " + std::to_string(singular_value) + ")"), value_(singular_value) {}
  double singular_value() const noexcept { return value_; }
  const char* kind() const noexcept override { return "singular_input"; }

 private:
  double value_;
};

class NotPsdError : public Error {
 public:
  NotPsdError(double min_eigenvalue, const std::string& what)
      : Error(what + " (eigenvalue " + std::to_string(min_eigenvalue) + ")"), value_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return value_; }
  const char* kind() const noexcept override { return "not_psd"; }

 private:
  double value_;
};

class InvalidSpectrumError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_spectrum"; }
};

class ShapeError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "shape"; }
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }
  const char* kind() const noexcept override { return "config"; }

 private:
  std::string field_;
};

class DegenerateStateError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_state"; }
};

class IntegrationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "integration"; }
};

class ScaleError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "scale"; }
};

class OrderingError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "ordering"; }
};

class EvolutionDegenerateError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "evolution_degenerate"; }
};

class InvalidCorrelationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_correlation"; }
};

class ComparisonError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "comparison"; }
};

}  // namespace foldtn
