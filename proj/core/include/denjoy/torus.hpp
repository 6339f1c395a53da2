#pragma once

// Points of the k-torus R^k / Z^k and of its universal cover.

#include <cstdint>

#include "denjoy/linalg.hpp"

namespace denjoy {

// x mod 1 in [0, 1).
double wrap_unit(double x) noexcept;

class TorusPoint {
 public:
  TorusPoint() = default;
  // Reduces every coordinate mod 1; throws NonFinite on inf/nan input.
  explicit TorusPoint(const Vector& coords);

  int dimension() const noexcept { return static_cast<int>(coords_.size()); }
  const Vector& coords() const noexcept { return coords_; }
  double operator[](int i) const { return coords_(i); }

  friend bool operator==(const TorusPoint& a, const TorusPoint& b) { return a.coords_ == b.coords_; }

 private:
  Vector coords_;
};

struct LiftPoint {
  Vector coords;

  TorusPoint reduce() const { return TorusPoint(coords); }
};

inline LiftPoint lift(const TorusPoint& x) { return LiftPoint{x.coords()}; }

// Translation vector (theta_1, ..., theta_k). Rational independence of
// {1, theta_i} cannot be checked in floating point; it is carried as a flag
// the caller sets.
struct TranslationVector {
  Vector theta;
  bool declared_irrational = true;

  int dimension() const noexcept { return static_cast<int>(theta.size()); }
};

TranslationVector make_translation(const Vector& theta, bool declared_irrational = true);

// Representative of (to - from) mod Z^k with every coordinate in [-1/2, 1/2).
// Ties at exactly 1/2 go to the smaller representative.
Vector minimal_displacement(const Vector& from, const Vector& to);

double torus_distance(const Vector& a, const Vector& b);

// frac(seed + n * theta) for one coordinate; see orbit_point.
double orbit_coordinate(double seed, double theta, std::int64_t n) noexcept;

// frac(seed + n * theta), with n * theta formed as an exact double-double
// product so that the reduction does not drift for large |n|.
Vector orbit_point(const Vector& seed, const Vector& theta, std::int64_t n);

// seed + n * theta in the cover (no reduction).
Vector orbit_lift(const Vector& seed, const Vector& theta, std::int64_t n);

}  // namespace denjoy
