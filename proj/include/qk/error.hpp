#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qk {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands drawn from different quantales, or a value outside its carrier.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Carrier or dimension mismatch between relations, categories or maps.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// The requested computation needs an enumeration or closed form that does
/// not exist for the given quantale or functor.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// A configured size guard was exceeded.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document; `path` names the offending field.
class ValidationError : public Error {
 public:
  ValidationError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Formula syntax error at a byte offset of the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("at " + std::to_string(position) + ": " + message), position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

}  // namespace qk
