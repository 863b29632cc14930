#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stage {

enum class ErrorKind {
  InvalidInput,
  InsufficientData,
  Degenerate,
  InvalidMatrix,
  Numeric,
  UnsupportedOrder,
  IncompleteWeights,
  UndefinedCorrelation,
  InsufficientItems,
  Schema,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// 2 for schema/validation problems, 3 for numeric or degenerate data.
int exit_code(ErrorKind kind);

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace stage
