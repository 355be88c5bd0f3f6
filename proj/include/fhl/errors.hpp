#pragma once

#include <stdexcept>
#include <string>

namespace fhl {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A configuration or a sampled table violates its invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its requested accuracy.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A simulated subordinator path ran out of steps before crossing its level.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double reached_level)
      : Error(what + " (reached level " + std::to_string(reached_level) + ")"),
        reached_level_(reached_level) {}

  double reached_level() const noexcept { return reached_level_; }

 private:
  double reached_level_;
};

}  // namespace fhl
