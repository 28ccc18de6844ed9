#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace forge {

// Base for every error this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, partial maps, dangling ids).
class InputError : public Error {
 public:
  using Error::Error;
};

// A parameter outside the documented domain (odd wall height, g < 2, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Query against an id the graph does not contain.
class QueryError : public Error {
 public:
  using Error::Error;
};

// An operation's stated precondition does not hold for otherwise valid input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace forge

namespace forge {

// A hypothesis the caller promised does not hold. `witness` names
// the offending pair (edge pair, vertex pair, ...) when there is one.
class HypothesisError : public Error {
 public:
  HypothesisError(const std::string& what, std::pair<int, int> witness)
      : Error(what), witness(witness) {}
  std::pair<int, int> witness;
};

}  // namespace forge
