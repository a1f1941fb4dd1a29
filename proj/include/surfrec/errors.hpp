#pragma once

#include <stdexcept>
#include <string>

namespace surfrec {

/// Invalid input: malformed files, bad options, grids of the wrong shape.
/// The CLI maps this family to exit status 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a hypothesis of the reconstruction theorem
/// (positive definiteness, eigenvalue floor, symmetry).
class HypothesisError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed grid file or report.
class FormatError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical abort: a frame or tangent pair degenerated during integration.
/// The CLI maps this to exit status 2.
class DegeneracyError : public std::runtime_error {
 public:
  DegeneracyError(const std::string& what, int i = -1, int j = -1)
      : std::runtime_error(what), i_(i), j_(j) {}

  int node_i() const { return i_; }
  int node_j() const { return j_; }

 private:
  int i_;
  int j_;
};

}  // namespace surfrec
