#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fusebench {

// Base of every data-level failure raised by the library. Precondition
// violations (bad classifier index, non-finite query score) use the standard
// std::invalid_argument / std::out_of_range instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyClass : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class DegenerateCounts : public Error {
 public:
  using Error::Error;
};

class InvalidRoc : public Error {
 public:
  using Error::Error;
};

class ZeroEer : public Error {
 public:
  using Error::Error;
};

class DegenerateRange : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class InvalidModel : public Error {
 public:
  using Error::Error;
};

class MissingHeader : public Error {
 public:
  using Error::Error;
};

class EmptyFile : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string reason)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + reason),
        line_(line),
        column_(column),
        reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

}  // namespace fusebench
