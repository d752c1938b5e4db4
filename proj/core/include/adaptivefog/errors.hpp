#pragma once

#include <stdexcept>
#include <string>

namespace adaptivefog {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stream could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Input text does not follow the expected layout (CSV header, JSON schema).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration or command usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A sample lies outside the bounds of the grid it is discretized on.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Latency model cannot be fitted or cannot resolve a lookup.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Mobility chain cannot be estimated from the given traces.
class EstimationError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual, long iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

/// Replay hit a slot the policy and model cannot serve.
class ReplayError : public Error {
 public:
  using Error::Error;
};

/// Scenario description for the synthetic generator is inconsistent.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Operation invoked with an incompatible problem (e.g. wrong horizon kind).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Process exit code for the command line tool: 2 config, 3 data, 4 solver.
int exit_code_for(const Error& error) noexcept;

}  // namespace adaptivefog
