#pragma once

#include <stdexcept>
#include <string>

namespace lsc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Minimal subset (or refit set) is rank deficient: coincident points,
/// collinear points for circle/homography, or a DLT system whose solution
/// is not unique beyond tolerance.
class DegenerateSubset : public Error {
 public:
  using Error::Error;
};

/// Model kind and data-point kind disagree (e.g. a line residual was
/// requested for a correspondence).
class KindMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidThreshold : public Error {
 public:
  using Error::Error;
};

class RankTooLarge : public Error {
 public:
  using Error::Error;
};

class ZeroMatrix : public Error {
 public:
  using Error::Error;
};

/// All origin distances are equal, so the entropy criterion is undefined.
/// Callers typically respond by retaining every index.
class DegenerateDistances : public Error {
 public:
  using Error::Error;
};

class TooFewPoints : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// File could not be parsed; the message carries the 1-based line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// File parsed but required columns/fields are missing.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsc
