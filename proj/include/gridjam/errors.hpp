#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridjam {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The measurement matrix lost rank (measurement graph disconnected).
class UnobservableSystem : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

// Cost triple violates p_jam_insecure <= p_jam_secure <= p_inject.
class InvalidCosts : public Error {
 public:
  using Error::Error;
};

// Exhaustive routine asked to run on a graph above its node cap.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// An attack plan references measurements the system does not have.
class PlanMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace gridjam
