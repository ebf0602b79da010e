#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phenocurve {

enum class ErrorKind {
  MalformedInput,   // shape or length contract broken by input data
  Parse,            // a cell could not be parsed
  Schema,           // configuration file missing/invalid field
  Contract,         // caller violated a documented precondition
  Identifiability,  // least-squares design is rank deficient
  DegenerateCurve,  // curve has no usable shape (e.g. constant)
  Numerical,        // non-finite values or solver failure
};

std::string_view to_string(ErrorKind kind);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& cell);
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class NumericalFailure : public Error {
 public:
  NumericalFailure(int iteration, const std::string& message);
  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Same kind, message prefixed with the pipeline stage that raised it.
Error with_stage(const Error& error, std::string_view stage);

// CLI exit code for an error kind: 2 for input problems, 3 for numerical ones.
int exit_code(ErrorKind kind);

inline void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorKind::Contract, message);
}

}  // namespace phenocurve
