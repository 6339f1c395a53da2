#pragma once

// Geometry of Conf(k) = GL(k,R) / (SO(k) x R*), the space of conformal
// structures on R^k. A structure [A] is represented by the unit-determinant
// SPD form A A^T / det(A A^T)^{1/k}; the left action [B] -> [AB] becomes the
// normalized congruence P -> A P A^T. Distances use the affine-invariant
// metric d(P, Q) = || log(P^{-1/2} Q P^{-1/2}) ||_F.

#include <complex>

#include "denjoy/linalg.hpp"

namespace denjoy::confspace {

class ConformalStructure;
ConformalStructure normalize(const Matrix& a);
ConformalStructure act(const Matrix& a, const ConformalStructure& p);

inline constexpr double kSingularTolerance = 1e-14;
inline constexpr double kSymmetryTolerance = 1e-12;
inline constexpr double kDeterminantTolerance = 1e-10;

class ConformalStructure {
 public:
  // Validates symmetry, positivity and unit determinant; throws NonSPDInput.
  static ConformalStructure from_form(const Matrix& form);

  // sigma_0 = [Id].
  static ConformalStructure base(int k);

  int dimension() const noexcept { return static_cast<int>(form_.rows()); }
  const Matrix& form() const noexcept { return form_; }

 private:
  friend ConformalStructure normalize(const Matrix& a);
  friend ConformalStructure act(const Matrix& a, const ConformalStructure& p);

  explicit ConformalStructure(Matrix form) : form_(std::move(form)) {}

  Matrix form_;
};

// [A] as a normalized form. Throws SingularMatrix if |det A| < 1e-14.
ConformalStructure normalize(const Matrix& a);

double conf_dist(const ConformalStructure& p, const ConformalStructure& q);

// A . [P], i.e. (A P A^T) / det(A P A^T)^{1/k}.
ConformalStructure act(const Matrix& a, const ConformalStructure& p);

/// Distance from [A] to the round structure, computed from the singular
/// values of A: with s_i = log sigma_i, the log-eigenvalues of normalize(A)
/// are 2 (s_i - mean(s)). Zero exactly on scalar multiples of orthogonal maps.
double dist_to_base(const Matrix& a);

/// max |Av| / min |Aw| over unit vectors.
double dilatation(const Matrix& a);

/// Complex dilatation mu = b / a of z -> a z + b conj(z) for a 2x2 matrix with
/// positive determinant. Throws DimensionMismatch or OrientationReversing.
std::complex<double> beltrami(const Matrix& a);

}  // namespace denjoy::confspace
