#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace evstud {

enum class ErrorCode {
  ParseError,
  CoverageError,
  ValidationError,
  ConfigError,
  ContractError,
  SingularDesign,
  DegenerateStatistic,
  InvalidCorrelation,
  InsufficientData,
  CollinearDesign,
  EmptySelection,
  NumericalError,
};

std::string_view error_code_name(ErrorCode code);

/// Exit code the CLI maps this error class to (2 = validation, 3 = numerical).
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string context = {})
      : std::runtime_error(std::move(message)),
        code_(code),
        context_(std::move(context)) {}

  ErrorCode code() const { return code_; }
  const std::string& context() const { return context_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
  std::string context_;
};

}  // namespace evstud
