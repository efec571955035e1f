/**
 * @file errors.hpp
 * @brief Error types. Validation errors map to CLI exit code 2, infeasibility
 * to exit code 3.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace miso {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RangeViolation : public ValidationError {
 public:
  RangeViolation(int slot, int user, const std::string& what)
      : ValidationError("range violation at slot " + std::to_string(slot) +
                        ", user " + std::to_string(user) + ": " + what),
        slot(slot),
        user(user) {}
  int slot;
  int user;
};

class LengthMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CornerInactive : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class TargetUnachievable : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class DeltaBarTooLarge : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class Infeasible : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class RateUnderflow : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooLargeToEnumerate : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BitOverflow : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class DegenerateGrid : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace miso
