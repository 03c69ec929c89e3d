#pragma once

#include <stdexcept>
#include <string>

namespace lob {

enum class ErrorCode {
  NonPositiveParameter,
  ScaleTooSmall,
  DimensionMismatch,
  InvalidArgument,
  PositivityViolation,
  NoConvergence,
  OrderingViolation,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
///
/// `field()` is non-empty for validation failures and names the offending
/// parameter (e.g. "lambda_s").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {})
      : std::runtime_error(std::move(message)), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

  /// True for failures of the numerical procedures rather than of their inputs.
  bool is_numerical() const noexcept {
    return code_ == ErrorCode::PositivityViolation || code_ == ErrorCode::NoConvergence ||
           code_ == ErrorCode::OrderingViolation;
  }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace lob
