#pragma once

#include <stdexcept>
#include <string>

namespace effeq {

/// Vectors of different dimension were combined, or a vector does not match
/// the dimension of a dispersion law.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A state, table or tuple list was built for a different lattice box or model.
class CutoffMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested computation exceeds the configured resource budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time step violates the stability bound of the chosen scheme.
class StepSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// NaN/Inf or blow-up detected during a computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace effeq
