#pragma once

#include <stdexcept>
#include <string>

namespace entrostab {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct NonHermitianInput : Error {
  using Error::Error;
};

struct InvalidDistribution : Error {
  using Error::Error;
};

struct InvalidState : Error {
  using Error::Error;
};

struct NotBlockDiagonal : Error {
  using Error::Error;
};

struct InvalidBlockState : Error {
  using Error::Error;
};

struct DecompositionMismatch : Error {
  using Error::Error;
};

struct NotAMember : Error {
  using Error::Error;
};

struct InfeasibleDirection : Error {
  using Error::Error;
};

// Eigensolver or iterative-fit breakdown.
struct NumericalError : Error {
  using Error::Error;
};

// Malformed input file (bad JSON, missing or mistyped field).
struct ParseError : Error {
  using Error::Error;
};

// Well-formed file whose contents fail semantic checks; the message
// names the offending field path.
struct ValidationError : Error {
  using Error::Error;
};

}  // namespace entrostab
