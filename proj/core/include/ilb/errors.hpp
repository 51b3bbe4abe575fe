#pragma once

#include <stdexcept>
#include <string>

namespace ilb {

// Base for every error the library raises. Each subclass maps to one CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration, dimension mismatch, violated precondition on inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed files.
class IoError : public Error {
 public:
  using Error::Error;
};

// Numerically singular systems (non-invertible layers, rank-deficient normal equations).
class SingularityError : public Error {
 public:
  using Error::Error;
};

// A caller broke an API contract (stale backward cache, unknown arm id, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Training diverged. Carries where it happened.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, int epoch, int stage, double last_finite_loss)
      : Error(what), epoch_(epoch), stage_(stage), last_finite_loss_(last_finite_loss) {}

  int epoch() const noexcept { return epoch_; }
  int stage() const noexcept { return stage_; }
  double last_finite_loss() const noexcept { return last_finite_loss_; }

 private:
  int epoch_;
  int stage_;
  double last_finite_loss_;
};

}  // namespace ilb
