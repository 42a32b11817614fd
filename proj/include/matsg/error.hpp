#pragma once

#include <stdexcept>
#include <string>

namespace matsg {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside the mathematical domain of an operation (non-square matrix,
// non-unipotent argument, basis mismatch, negative time).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A documented precondition failed (equivalent solutions passed to
// pi_sequence, non-commuting family, odd dimension with a rotation).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Floating point machinery failed to converge or a tolerance was too tight.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A construction has no valid ingredients (no admissible basis pair,
// no admissible sample for the rotation pairing).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// Data contradicts a structural law (kernels differ across samples).
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// Malformed JSON, expression or schema violation.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace matsg
