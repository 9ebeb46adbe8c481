#pragma once

#include <stdexcept>
#include <string>

namespace tomd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input of any kind: shapes, ranks, indices, files. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ModeIndexError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NetworkError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RankError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateReferenceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class SymmetryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class AffinityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IngestError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A solver produced a result that fails its own postcondition. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tomd
