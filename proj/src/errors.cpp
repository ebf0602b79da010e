#include "phenocurve/errors.hpp"

namespace phenocurve {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedInput: return "malformed-input";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Contract: return "contract";
    case ErrorKind::Identifiability: return "identifiability";
    case ErrorKind::DegenerateCurve: return "degenerate-curve";
    case ErrorKind::Numerical: return "numerical-failure";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(std::size_t row, std::size_t column, const std::string& cell)
    : Error(ErrorKind::Parse, "cannot parse cell '" + cell + "' at row " + std::to_string(row) +
                                  ", column " + std::to_string(column)),
      row_(row),
      column_(column) {}

NumericalFailure::NumericalFailure(int iteration, const std::string& message)
    : Error(ErrorKind::Numerical, message + " (iteration " + std::to_string(iteration) + ")"),
      iteration_(iteration) {}

SchemaError::SchemaError(std::string field, const std::string& message)
    : Error(ErrorKind::Schema, "config field '" + field + "': " + message), field_(std::move(field)) {}

Error with_stage(const Error& error, std::string_view stage) {
  return Error(error.kind(), std::string(stage) + ": " + error.what());
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Numerical:
    case ErrorKind::DegenerateCurve:
      return 3;
    default:
      return 2;
  }
}

}  // namespace phenocurve
