#pragma once

#include <cmath>
#include <memory>

#include "denjoy/blowup.hpp"
#include "denjoy/torus.hpp"

namespace denjoy::fixtures {

inline TranslationVector default_theta() {
  Vector t(2);
  t << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0;
  return make_translation(t);
}

// k = 2, c_r = 0.05, p = 0.8, V_max = 0.5.
inline std::shared_ptr<const blowup::BallSystem> default_system(int window = 2000) {
  return std::make_shared<const blowup::BallSystem>(
      blowup::build_ball_system(default_theta(), window, blowup::Schedule{0.05, 0.8}, 0.5));
}

inline Matrix rotation2(double a) {
  Matrix r(2, 2);
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

inline Matrix diag2(double a, double b) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = a;
  d(1, 1) = b;
  return d;
}

}  // namespace denjoy::fixtures
