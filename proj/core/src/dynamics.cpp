#include "denjoy/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "denjoy/confspace.hpp"
#include "denjoy/error.hpp"

namespace denjoy::dynamics {

ModelMap::ModelMap(int dimension, LiftFn lift, JacobianFn jacobian, std::string description)
    : dimension_(dimension),
      lift_(std::move(lift)),
      jacobian_(std::move(jacobian)),
      description_(std::move(description)) {
  if (dimension_ < 1) throw Error(ErrorCode::InvalidArgument, "map dimension must be >= 1");
  if (!lift_ || !jacobian_) throw Error(ErrorCode::InvalidArgument, "map evaluators are required");
}

void ModelMap::check_dimension(Eigen::Index n) const {
  if (n != dimension_) {
    std::ostringstream os;
    os << "point of dimension " << n << " passed to a map of dimension " << dimension_;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

TorusPoint ModelMap::eval(const TorusPoint& x) const {
  check_dimension(x.dimension());
  return TorusPoint(lift_(x.coords()));
}

LiftPoint ModelMap::eval_lift(const LiftPoint& x) const {
  check_dimension(x.coords.size());
  Vector y = lift_(x.coords);
  if (!y.allFinite()) throw Error(ErrorCode::NonFinite, "lift evaluation produced non-finite value");
  return LiftPoint{std::move(y)};
}

Matrix ModelMap::jacobian(const TorusPoint& x) const {
  check_dimension(x.dimension());
  return jacobian_(x.coords());
}

ModelMap translation_map(const TranslationVector& theta) {
  const int k = theta.dimension();
  const Vector t = theta.theta;
  std::ostringstream os;
  os << "translation by (";
  for (int i = 0; i < k; ++i) os << (i ? ", " : "") << t(i);
  os << ")";
  return ModelMap(
      k, [t](const Vector& x) -> Vector { return x + t; },
      [k](const Vector&) -> Matrix { return Matrix::Identity(k, k); }, os.str());
}

OrbitTrace iterate(const ModelMap& f, const TorusPoint& x, std::size_t n) {
  OrbitTrace trace;
  trace.start = x;
  trace.points.reserve(n + 1);
  trace.lifts.reserve(n + 1);
  trace.points.push_back(x);
  trace.lifts.push_back(lift(x));
  for (std::size_t i = 0; i < n; ++i) {
    const TorusPoint& p = trace.points.back();
    const LiftPoint image = f.eval_lift(lift(p));
    trace.lifts.push_back(LiftPoint{trace.lifts.back().coords + (image.coords - p.coords())});
    trace.points.push_back(image.reduce());
  }
  return trace;
}

RotationEstimate rotation_vector(const ModelMap& f, const TorusPoint& x, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "rotation estimate needs n >= 1");
  const int k = f.dimension();
  // F^n(x) - x is the sum of the per-step displacements F(p_i) - p_i because
  // F commutes with integer translations; Neumaier summation keeps n ~ 1e5
  // iterations at the 1e-16 level.
  Vector sum = Vector::Zero(k);
  Vector comp = Vector::Zero(k);
  double max_disp = 0.0;
  TorusPoint p = x;
  for (std::size_t i = 0; i < n; ++i) {
    const LiftPoint image = f.eval_lift(lift(p));
    const Vector disp = image.coords - p.coords();
    max_disp = std::max(max_disp, disp.cwiseAbs().maxCoeff());
    for (int c = 0; c < k; ++c) {
      const double t = sum(c) + disp(c);
      if (std::abs(sum(c)) >= std::abs(disp(c))) {
        comp(c) += (sum(c) - t) + disp(c);
      } else {
        comp(c) += (disp(c) - t) + sum(c);
      }
      sum(c) = t;
    }
    p = image.reduce();
  }
  RotationEstimate est;
  est.mean_displacement = (sum + comp) / static_cast<double>(n);
  est.estimate = make_translation(est.mean_displacement);
  est.error_bar = 2.0 * k * max_disp / static_cast<double>(n);
  return est;
}

Cocycle cocycle(const ModelMap& f, const TorusPoint& x, std::size_t n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "cocycle needs n >= 1");
  const int k = f.dimension();
  Cocycle c;
  c.steps.reserve(n);
  c.product = Matrix::Identity(k, k);
  TorusPoint p = x;
  for (std::size_t i = 0; i < n; ++i) {
    Matrix step = f.jacobian(p);
    if (!(std::abs(step.determinant()) >= confspace::kSingularTolerance)) {
      std::ostringstream os;
      os << "step " << i << " Jacobian is singular";
      throw Error(ErrorCode::SingularMatrix, os.str());
    }
    c.product = step * c.product;
    c.steps.push_back(std::move(step));
    p = f.eval(p);
  }
  return c;
}

}  // namespace denjoy::dynamics
