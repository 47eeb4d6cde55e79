#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poseval {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class UnsupportedFormatError : public ParseError {
public:
  using ParseError::ParseError;
};

class EmptyStructureError : public Error {
public:
  using Error::Error;
};

/// A function was called outside its documented domain.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// No label-preserving isomorphism exists between two ligand graphs.
class MappingError : public Error {
public:
  using Error::Error;
};

/// A search exceeded its node budget.
class ResourceError : public Error {
public:
  using Error::Error;
};

class SchemaError : public Error {
public:
  SchemaError(const std::string& what, std::size_t line, std::string field)
      : Error((line ? "line " + std::to_string(line) + ", " : std::string()) + "field '" + field + "': " + what),
        line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

private:
  std::size_t line_;
  std::string field_;
};

}  // namespace poseval
