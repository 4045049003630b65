#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vcsel {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input or violated precondition. The CLI maps these to exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// CSV ingestion failure. row is 1-based over data lines (0 = header),
// column is the offending column name when known.
class CsvError : public ValidationError {
 public:
  CsvError(const std::string& what, std::size_t row, std::string column)
      : ValidationError(what), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// Query text that cannot be turned into a plan. position is a 0-based
// byte offset into the query string.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : ValidationError(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace vcsel
