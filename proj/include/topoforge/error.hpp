#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topoforge {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

// Raised when an enumeration would return more items than its cap allows.
class CapExceededError : public Error {
 public:
  CapExceededError(std::size_t cap, const std::string& what)
      : Error(what), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

class NotInTreeError : public Error {
 public:
  using Error::Error;
};

class IterationLimitError : public Error {
 public:
  using Error::Error;
};

class InfeasibleDemandError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class MissingCoordinatesError : public ParseError {
 public:
  using ParseError::ParseError;
};

class MissingCapacityError : public ParseError {
 public:
  using ParseError::ParseError;
};

class InvalidKappaError : public Error {
 public:
  using Error::Error;
};

class DisconnectedError : public Error {
 public:
  using Error::Error;
};

class BudgetTooSmallError : public Error {
 public:
  using Error::Error;
};

class InvalidPlanError : public Error {
 public:
  using Error::Error;
};

}  // namespace topoforge
