#pragma once

#include <stdexcept>
#include <string>

namespace dwelltime {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (non-positive mass, zero detuning, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Incident energy coincides with a real segment potential (k_j = 0).
class DegenerateWavenumberError : public Error {
 public:
  using Error::Error;
};

// |t|^2 + |r|^2 exceeds 1 or the absorbed fraction is inconsistent.
class UnitarityViolation : public Error {
 public:
  using Error::Error;
};

// Vanishing denominator in a closed-form eigenvalue.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, double momentum)
      : Error(what), momentum_(momentum) {}
  double momentum() const noexcept { return momentum_; }

 private:
  double momentum_;
};

// A numerical estimate failed to reach its tolerance.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration file or CLI input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dwelltime
