#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <memory>
#include <random>

#include "denjoy/denjoy_circle.hpp"
#include "denjoy/dynamics.hpp"
#include "denjoy/error.hpp"

using namespace denjoy;
using namespace denjoy::dynamics;

namespace {

// Small truncation keeps construction cheap; tolerance loosened to match.
DenjoyParams small_params() {
  DenjoyParams p;
  p.truncation = 20000;
  p.tail_tolerance = 1e-4;
  return p;
}

const DenjoyCircle& circle() {
  static const DenjoyCircle c(small_params());
  return c;
}

}  // namespace

TEST(DenjoyCircle, SeriesOracle) {
  using boost::multiprecision::cpp_bin_float_50;
  const cpp_bin_float_50 pi = boost::math::constants::pi<cpp_bin_float_50>();
  const cpp_bin_float_50 coth = cosh(pi) / sinh(pi);
  const double oracle = static_cast<double>(cpp_bin_float_50(0.1) * pi * coth);
  EXPECT_NEAR(circle().series_length(), oracle, 1e-15);
  EXPECT_NEAR(oracle, 0.315334, 1e-6);
}

TEST(DenjoyCircle, TruncatedLengthWithinTail) {
  const double gap = circle().series_length() - circle().inserted_length();
  EXPECT_GT(gap, 0.0);
  EXPECT_LE(gap, circle().tail_bound());
  EXPECT_NEAR(circle().tail_bound(), 2.0 * 0.1 / 20000.0, 1e-18);
}

TEST(DenjoyCircle, ConstructionErrors) {
  DenjoyParams big = small_params();
  big.c = 0.5;
  try {
    DenjoyCircle c(big);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
  DenjoyParams short_tail = small_params();
  short_tail.truncation = 100;
  try {
    DenjoyCircle c(short_tail);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TailTooLarge);
  }
}

TEST(DenjoyCircle, IntervalLengths) {
  EXPECT_DOUBLE_EQ(circle().interval_length(0), 0.1);
  EXPECT_DOUBLE_EQ(circle().interval_length(3), 0.01);
  EXPECT_DOUBLE_EQ(circle().interval_length(-3), 0.01);
}

TEST(DenjoyCircle, DerivativeIsOneAtEndpoints) {
  for (std::int64_t n : {0, 1, -1, 2, 7, -40, 1000, -9999}) {
    const double s = circle().interval_start(n);
    EXPECT_NEAR(circle().derivative(s), 1.0, 1e-9) << n;
    EXPECT_NEAR(circle().derivative(s + circle().interval_length(n)), 1.0, 1e-9) << n;
  }
}

TEST(DenjoyCircle, IntervalsMapOntoSuccessors) {
  for (std::int64_t n : {0, 1, -1, 5, -17, 300, 15000}) {
    const double s = circle().interval_start(n);
    const double l = circle().interval_length(n);
    const double t = circle().interval_start(n + 1);
    const double tl = circle().interval_length(n + 1);
    const double a = circle().lift(s);
    const double b = circle().lift(s + l);
    EXPECT_NEAR(a - std::floor(a), t, 1e-12) << n;
    EXPECT_NEAR(b - a, tl, 1e-12) << n;
  }
}

TEST(DenjoyCircle, LiftIsMonotoneDegreeOne) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double prev = circle().lift(0.0);
  for (int i = 1; i <= 20000; ++i) {
    const double z = i / 20000.0;
    const double fz = circle().lift(z);
    EXPECT_GE(fz, prev - 1e-12);
    prev = fz;
  }
  for (int t = 0; t < 200; ++t) {
    const double z = u(rng);
    EXPECT_NEAR(circle().lift(z + 1.0), circle().lift(z) + 1.0, 1e-12);
  }
}

TEST(DenjoyCircle, CollapseSemiconjugacy) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double alpha = circle().params().alpha;
  for (int t = 0; t < 2000; ++t) {
    const double z = u(rng);
    const double lhs = circle().collapse(circle().lift(z));
    const double rhs = circle().collapse(z) + alpha;
    const double d = std::abs(std::remainder(lhs - rhs, 1.0));
    EXPECT_LE(d, 1e-9) << z;
  }
}

TEST(DenjoyCircle, WanderingIntervalImagesDisjoint) {
  const auto check = wandering_images(circle(), 100);
  EXPECT_TRUE(check.disjoint);
  EXPECT_EQ(check.images, 101u);
  EXPECT_GT(check.min_gap, 0.0);
}

TEST(DenjoyCircle, DerivativeGrowthDominatesMeanValueOracle) {
  for (std::size_t n : {1, 10, 100, 1000}) {
    const double measured = max_log_derivative(circle(), n, 401);
    const double oracle = std::log(circle().interval_length(0) / circle().interval_length(static_cast<std::int64_t>(n)));
    EXPECT_GE(measured, oracle - 1e-9) << n;
  }
}

TEST(DenjoyCircle, RotationNumber) {
  const auto f = denjoy_circle(std::make_shared<const DenjoyCircle>(small_params()));
  const auto est = rotation_vector(f, TorusPoint(Vector::Constant(1, 0.3)), 20000);
  EXPECT_NEAR(est.estimate.theta(0), small_params().alpha, 1e-3);
}

TEST(DenjoyCircle, OrbitStaysFinite) {
  const auto f = denjoy_circle(std::make_shared<const DenjoyCircle>(small_params()));
  const auto trace = iterate(f, TorusPoint(Vector::Constant(1, 0.05)), 10000);
  for (const auto& p : trace.points) ASSERT_TRUE(std::isfinite(p[0]));
}
