#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stlkit {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A file could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Byte range [begin, end) into the text a diagnostic refers to.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

class LexError : public Error {
 public:
  LexError(std::size_t position, std::string offending)
      : Error("unrecognized character '" + offending + "' at offset " +
              std::to_string(position)),
        position_(position),
        offending_(std::move(offending)) {}

  std::size_t position() const { return position_; }
  const std::string& offending() const { return offending_; }

 private:
  std::size_t position_;
  std::string offending_;
};

class ParseError : public Error {
 public:
  ParseError(Span span, std::string message, std::vector<std::string> expected = {})
      : Error(std::move(message)), span_(span), expected_(std::move(expected)) {}

  Span span() const { return span_; }
  /// Token classes that would have been accepted at span().begin.
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Span span_;
  std::vector<std::string> expected_;
};

/// Interval with lo >= hi or a negative bound.
class IntervalError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace stlkit
