#pragma once

#include <stdexcept>
#include <string>

namespace kdsim {

/// Argument outside the domain of a physical formula (non-positive energy, zero separation, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Configuration file or in-memory configuration that fails validation.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A propagation leg whose grid cannot resolve the kernel chirp.
class SamplingError : public ConfigError {
 public:
  SamplingError(const std::string& what, long required_samples)
      : ConfigError(what), required_samples_(required_samples) {}
  long required_samples() const noexcept { return required_samples_; }

 private:
  long required_samples_;
};

/// Physically invalid run, e.g. an energy loss that exceeds the kinetic energy.
class InvalidRunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical analysis step that cannot produce a value (missing order, unreachable target, ...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kdsim
