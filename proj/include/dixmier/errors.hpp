#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dixmier {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes do not fit (non-square input, size mismatch, n = 0, odd n where even is required).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition on the input does not hold.
class ContractError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

class NotPsdError : public Error {
 public:
  NotPsdError(const std::string& what, double min_eigenvalue)
      : Error(what), min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

/// Raised when a rank or trace cannot be split into the required integer
/// pieces at this matrix size. `rational_solution` holds the fractional
/// answer (if any) and `multiplier` the factor by which the dimension would
/// have to grow for an integral solution to exist.
class DivisibilityError : public Error {
 public:
  explicit DivisibilityError(const std::string& what, std::vector<double> rational_solution = {},
                             long multiplier = 0)
      : Error(what), rational_solution_(std::move(rational_solution)), multiplier_(multiplier) {}
  const std::vector<double>& rational_solution() const noexcept { return rational_solution_; }
  long multiplier() const noexcept { return multiplier_; }

 private:
  std::vector<double> rational_solution_;
  long multiplier_;
};

/// Spectrum of T - I is not symmetric about zero.
class SymmetryError : public Error {
 public:
  SymmetryError(const std::string& what, std::vector<double> unmatched)
      : Error(what), unmatched_(std::move(unmatched)) {}
  const std::vector<double>& unmatched() const noexcept { return unmatched_; }

 private:
  std::vector<double> unmatched_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// A construction's own algebraic identity check failed.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace dixmier
