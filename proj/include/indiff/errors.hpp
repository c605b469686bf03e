#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace indiff {

// Bad model, claim or configuration. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical contract was breached (out-of-domain iterate, failed invariant).
// Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The k-doubling did not meet its stopping rule within the cap.
class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& what, std::vector<double> ks, std::vector<double> values)
      : NumericalError(what), ks_(std::move(ks)), values_(std::move(values)) {}

  const std::vector<double>& ks() const noexcept { return ks_; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::vector<double> ks_;
  std::vector<double> values_;
};

// File could not be read or written. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace indiff
