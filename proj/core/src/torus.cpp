#include "denjoy/torus.hpp"

#include <cmath>

#include "denjoy/error.hpp"

namespace denjoy {

double wrap_unit(double x) noexcept {
  double r = x - std::floor(x);
  // x slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

TorusPoint::TorusPoint(const Vector& coords) : coords_(coords.size()) {
  if (!coords.allFinite()) {
    throw Error(ErrorCode::NonFinite, "torus point has non-finite coordinates");
  }
  for (Eigen::Index i = 0; i < coords.size(); ++i) coords_(i) = wrap_unit(coords(i));
}

TranslationVector make_translation(const Vector& theta, bool declared_irrational) {
  if (theta.size() < 1 || !theta.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "translation vector must be finite and non-empty");
  }
  TranslationVector t;
  t.theta = TorusPoint(theta).coords();
  t.declared_irrational = declared_irrational;
  return t;
}

Vector minimal_displacement(const Vector& from, const Vector& to) {
  if (from.size() != to.size()) {
    throw Error(ErrorCode::DimensionMismatch, "points of different dimension");
  }
  Vector d = to - from;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    double v = d(i) - std::floor(d(i));  // [0, 1]
    if (v >= 0.5) v -= 1.0;
    d(i) = v;
  }
  return d;
}

double torus_distance(const Vector& a, const Vector& b) { return minimal_displacement(a, b).norm(); }

// frac(s + n*t) using the error-free product n*t = p + e.
double orbit_coordinate(double s, double t, std::int64_t n) noexcept {
  const double nd = static_cast<double>(n);
  const double p = nd * t;
  const double e = std::fma(nd, t, -p);
  const double pf = p - std::floor(p);  // exact for |p| < 2^52
  return wrap_unit(wrap_unit(pf + s) + e);
}

Vector orbit_point(const Vector& seed, const Vector& theta, std::int64_t n) {
  if (seed.size() != theta.size()) {
    throw Error(ErrorCode::DimensionMismatch, "seed and translation differ in dimension");
  }
  Vector out(seed.size());
  for (Eigen::Index i = 0; i < seed.size(); ++i) out(i) = orbit_coordinate(seed(i), theta(i), n);
  return out;
}

Vector orbit_lift(const Vector& seed, const Vector& theta, std::int64_t n) {
  if (seed.size() != theta.size()) {
    throw Error(ErrorCode::DimensionMismatch, "seed and translation differ in dimension");
  }
  return seed + static_cast<double>(n) * theta;
}

}  // namespace denjoy
