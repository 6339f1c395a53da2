#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "denjoy/linalg.hpp"
#include "denjoy/torus.hpp"

namespace denjoy::dynamics {

// A map of the k-torus given through a lift F: R^k -> R^k that commutes with
// integer translations, together with its Jacobian.
class ModelMap {
 public:
  using LiftFn = std::function<Vector(const Vector&)>;
  using JacobianFn = std::function<Matrix(const Vector&)>;

  ModelMap(int dimension, LiftFn lift, JacobianFn jacobian, std::string description);

  int dimension() const noexcept { return dimension_; }
  const std::string& description() const noexcept { return description_; }

  TorusPoint eval(const TorusPoint& x) const;
  LiftPoint eval_lift(const LiftPoint& x) const;
  Matrix jacobian(const TorusPoint& x) const;

 private:
  void check_dimension(Eigen::Index n) const;

  int dimension_;
  LiftFn lift_;
  JacobianFn jacobian_;
  std::string description_;
};

struct OrbitTrace {
  TorusPoint start;
  std::vector<TorusPoint> points;  // n + 1 entries, points[0] == start
  std::vector<LiftPoint> lifts;    // lifts[0] == lift(start)
};

struct RotationEstimate {
  Vector mean_displacement;  // (F^n(x) - x) / n, unreduced
  TranslationVector estimate;
  double error_bar = 0.0;  // 2 k max|displacement| / n
};

struct Cocycle {
  std::vector<Matrix> steps;  // Df(f^i x), i = 0..n-1
  Matrix product;             // Df(f^{n-1} x) ... Df(x)
};

ModelMap translation_map(const TranslationVector& theta);

// Throws NonFinite if an iterate leaves the reals.
OrbitTrace iterate(const ModelMap& f, const TorusPoint& x, std::size_t n);

RotationEstimate rotation_vector(const ModelMap& f, const TorusPoint& x, std::size_t n);

Cocycle cocycle(const ModelMap& f, const TorusPoint& x, std::size_t n);

}  // namespace denjoy::dynamics
