#pragma once

#include <stdexcept>
#include <string>

namespace qtopo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands live on spaces of different dimension.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An argument violates a documented precondition (range, positivity, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A serialized document is malformed or of the wrong kind.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A construction could not produce a certified measurement.
class CertificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtopo
