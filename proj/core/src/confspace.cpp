#include "denjoy/confspace.hpp"

#include <cmath>
#include <sstream>

#include "denjoy/error.hpp"

namespace denjoy::confspace {

namespace {

constexpr double kEigenFloor = 1e-300;

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    std::ostringstream os;
    os << what << " must be a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
  if (!a.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
  }
}

void require_invertible(const Matrix& a) {
  require_square(a, "matrix");
  const double det = a.determinant();
  if (!(std::abs(det) >= kSingularTolerance)) {
    std::ostringstream os;
    os << "|det| = " << std::abs(det) << " below " << kSingularTolerance;
    throw Error(ErrorCode::SingularMatrix, os.str());
  }
}

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// Rescales an SPD matrix to unit determinant using its eigenvalues, which is
// better conditioned than dividing by the LU determinant.
Matrix unit_determinant(const Matrix& spd) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(spd));
  const Vector& ev = eig.eigenvalues();
  if (ev.minCoeff() <= kEigenFloor) {
    throw Error(ErrorCode::SingularMatrix, "form lost positive definiteness");
  }
  const double mean_log = ev.array().log().mean();
  return symmetrized(spd * std::exp(-mean_log));
}

}  // namespace

ConformalStructure ConformalStructure::from_form(const Matrix& form) {
  if (form.rows() != form.cols() || form.rows() < 1) {
    throw Error(ErrorCode::DimensionMismatch, "conformal structure needs a square form");
  }
  if (!form.allFinite()) {
    throw Error(ErrorCode::NonSPDInput, "form has non-finite entries");
  }
  const double asym = (form - form.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    std::ostringstream os;
    os << "form asymmetric by " << asym;
    throw Error(ErrorCode::NonSPDInput, os.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(form), Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= kEigenFloor) {
    throw Error(ErrorCode::NonSPDInput, "form is not positive definite");
  }
  const double det = eig.eigenvalues().prod();
  if (std::abs(det - 1.0) > kDeterminantTolerance) {
    std::ostringstream os;
    os << "form determinant " << det << " is not 1";
    throw Error(ErrorCode::NonSPDInput, os.str());
  }
  return ConformalStructure(form);
}

ConformalStructure ConformalStructure::base(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  return ConformalStructure(Matrix::Identity(k, k));
}

ConformalStructure normalize(const Matrix& a) {
  require_invertible(a);
  return ConformalStructure(unit_determinant(a * a.transpose()));
}

double conf_dist(const ConformalStructure& p, const ConformalStructure& q) {
  if (p.dimension() != q.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "structures of different dimension");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig_p(p.form());
  const Vector& ev = eig_p.eigenvalues();
  if (ev.minCoeff() <= kEigenFloor) {
    throw Error(ErrorCode::NonSPDInput, "first argument is not positive definite");
  }
  const Matrix& v = eig_p.eigenvectors();
  const Matrix p_inv_sqrt = v * ev.array().rsqrt().matrix().asDiagonal() * v.transpose();
  const Matrix m = symmetrized(p_inv_sqrt * q.form() * p_inv_sqrt);
  Eigen::SelfAdjointEigenSolver<Matrix> eig_m(m, Eigen::EigenvaluesOnly);
  const Vector& mu = eig_m.eigenvalues();
  if (mu.minCoeff() <= kEigenFloor) {
    throw Error(ErrorCode::NonSPDInput, "second argument is not positive definite");
  }
  return mu.array().log().matrix().norm();
}

ConformalStructure act(const Matrix& a, const ConformalStructure& p) {
  require_invertible(a);
  if (a.rows() != p.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "group element and structure differ in dimension");
  }
  return ConformalStructure(unit_determinant(a * p.form() * a.transpose()));
}

double dist_to_base(const Matrix& a) {
  require_invertible(a);
  Eigen::JacobiSVD<Matrix> svd(a);
  const Eigen::ArrayXd logs = svd.singularValues().array().log();
  return 2.0 * (logs - logs.mean()).matrix().norm();
}

double dilatation(const Matrix& a) {
  require_invertible(a);
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

std::complex<double> beltrami(const Matrix& a) {
  require_square(a, "matrix");
  if (a.rows() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "Beltrami coefficient needs k = 2");
  }
  if (!(a.determinant() > 0.0)) {
    throw Error(ErrorCode::OrientationReversing, "det <= 0");
  }
  const std::complex<double> za(0.5 * (a(0, 0) + a(1, 1)), 0.5 * (a(1, 0) - a(0, 1)));
  const std::complex<double> zb(0.5 * (a(0, 0) - a(1, 1)), 0.5 * (a(1, 0) + a(0, 1)));
  return zb / za;
}

}  // namespace denjoy::confspace
