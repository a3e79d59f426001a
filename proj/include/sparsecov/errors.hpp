#pragma once

#include <stdexcept>
#include <string>

namespace sparsecov {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

// A data column (or covariance diagonal entry) has no variance.
class DegenerateColumn : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed user input: bad CSV cells, unparsable penalty strings, invalid parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsecov
