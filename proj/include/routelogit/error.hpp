#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace routelogit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON syntax, missing keys, wrong types).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Members of an event collection disagree on a travel time that should be
/// known under perfect online information.
class PoiConsistencyError : public Error {
 public:
  using Error::Error;
};

class HorizonError : public Error {
 public:
  using Error::Error;
};

class CapExceededError : public Error {
 public:
  using Error::Error;
};

class InvalidSequenceError : public Error {
 public:
  using Error::Error;
};

class UnreachableDestinationError : public Error {
 public:
  using Error::Error;
};

/// An observation has zero likelihood under the model.
class ZeroProbabilityError : public Error {
 public:
  ZeroProbabilityError(std::size_t index, const std::string& what)
      : Error(what), index_(index) {}
  std::size_t observation_index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace routelogit
