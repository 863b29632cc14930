#include "stage/error.hpp"

namespace stage {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Degenerate: return "degenerate-input";
    case ErrorKind::InvalidMatrix: return "invalid-matrix";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::UnsupportedOrder: return "unsupported-order";
    case ErrorKind::IncompleteWeights: return "incomplete-weights";
    case ErrorKind::UndefinedCorrelation: return "undefined-correlation";
    case ErrorKind::InsufficientItems: return "insufficient-items";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InsufficientData:
    case ErrorKind::Degenerate:
    case ErrorKind::Numeric:
    case ErrorKind::UnsupportedOrder:
    case ErrorKind::UndefinedCorrelation:
    case ErrorKind::InsufficientItems:
      return 3;
    default:
      return 2;
  }
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace stage
