#pragma once

#include <stdexcept>
#include <string>

namespace fastsize {

// Base of every error the engine raises. Each subclass maps to one CLI exit
// code, see cli/commands.hpp.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (syntax, unknown key, bad type). Carries line context
// in the message.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A quantity with a unit token the field does not accept.
class UnitError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Well-formed input that breaks a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class RegressionError : public Error {
 public:
  using Error::Error;
};

class PowertrainError : public Error {
 public:
  using Error::Error;
};

// The aircraft cannot fly the mission as specified (stall, fuel or battery
// exhausted, infeasible demand).
class MissionError : public Error {
 public:
  MissionError(const std::string& what, int segment_index = -1)
      : Error(what), segment_index_(segment_index) {}

  int segment_index() const { return segment_index_; }

 private:
  int segment_index_;
};

}  // namespace fastsize
