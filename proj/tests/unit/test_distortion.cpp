#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "denjoy/confspace.hpp"
#include "denjoy/distortion.hpp"
#include "denjoy/error.hpp"
#include "denjoy/sampling.hpp"
#include "support.hpp"

using namespace denjoy;
using namespace denjoy::distortion;

namespace {

const std::shared_ptr<const blowup::BallSystem>& sys() {
  static const auto s = fixtures::default_system();
  return s;
}

Matrix diag_exp(int k, double eps) {
  Matrix n = blowup::diagonal_direction(k);
  Matrix a = Matrix::Zero(k, k);
  for (int i = 0; i < k; ++i) a(i, i) = std::exp(eps * n(i, i));
  return a;
}

}  // namespace

TEST(Telescoping, RandomCocyclesNeverExceedRunningSum) {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> len(1, 100), dim(2, 4);
  for (int t = 0; t < 100; ++t) {
    const int k = dim(rng);
    std::vector<Matrix> steps;
    for (int i = len(rng); i > 0; --i) steps.push_back(sampling::random_invertible(k, rng, 0.3));
    const auto tr = trace_matrix_cocycle(steps);
    for (std::size_t n = 0; n < tr.length(); ++n) EXPECT_LE(tr.direct[n], tr.telescoped[n] + 1e-8);
  }
}

TEST(Telescoping, SharedSignDiagonalFamilyIsEquality) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 0.1);
  for (int k : {2, 3, 4}) {
    std::vector<Matrix> steps;
    for (int i = 0; i < 60; ++i) steps.push_back(diag_exp(k, u(rng)));
    const auto tr = trace_matrix_cocycle(steps);
    for (std::size_t n = 0; n < tr.length(); ++n) EXPECT_NEAR(tr.direct[n], tr.telescoped[n], 1e-9);
  }
}

TEST(Telescoping, MixedSignsCancel) {
  const std::vector<Matrix> steps = {diag_exp(2, 0.2), diag_exp(2, -0.2)};
  const auto tr = trace_matrix_cocycle(steps);
  EXPECT_NEAR(tr.direct[1], 0.0, 1e-14);
  EXPECT_NEAR(tr.telescoped[1], 0.8, 1e-12);
}

TEST(CocycleDistortion, TranslationOnlyFieldIsZero) {
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 2, 0.0, blowup::diagonal_direction(2)));
  const auto tr = trace_cocycle_distortion(f, TorusPoint(sys()->center(0)), 200);
  for (std::size_t n = 0; n < tr.length(); ++n) {
    EXPECT_NEAR(tr.direct[n], 0.0, 1e-12);
    EXPECT_EQ(tr.telescoped[n], 0.0);
  }
}

TEST(CocycleDistortion, SingleNonconformalStep) {
  const auto& s = *sys();
  blowup::DistortionProfile prof{2, std::vector<double>(static_cast<std::size_t>(s.size()), 0.0),
                                 blowup::diagonal_direction(2)};
  prof.amplitudes[static_cast<std::size_t>(s.window())] = 0.3;
  const blowup::SyntheticField f(sys(), prof);
  const auto tr = trace_cocycle_distortion(f, TorusPoint(s.center(0)), 50);
  for (std::size_t n = 0; n < tr.length(); ++n) {
    EXPECT_NEAR(tr.direct[n], 0.6, 1e-12);
    EXPECT_NEAR(tr.telescoped[n], 0.6, 1e-12);
  }
}

TEST(CocycleDistortion, OffSystemPointsTranslate) {
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 2, 0.3, blowup::diagonal_direction(2)));
  Vector x = sys()->center(0);
  x(0) += 1.5 * sys()->radius(0);
  ASSERT_FALSE(sys()->locate(TorusPoint(x)));
  const auto tr = trace_cocycle_distortion(f, TorusPoint(x), 3);
  EXPECT_FALSE(tr.ball[0].has_value());
  EXPECT_EQ(tr.step_distance[0], 0.0);
}

TEST(CocycleDistortion, WindowEdge) {
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 2, 0.3, blowup::diagonal_direction(2)));
  try {
    trace_cocycle_distortion(f, TorusPoint(sys()->center(1990)), 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowEdge);
  }
}

TEST(Flatness, ClosedFormConstant) {
  // m = k = 2, eps = 0.3, r = 0.05 -> C = 2 * 0.3 / 0.05^2 = 240.
  Vector theta(2);
  theta << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0;
  auto one = std::make_shared<const blowup::BallSystem>(
      blowup::build_ball_system(make_translation(theta), 1, blowup::Schedule{0.05, 0.0}, 0.5));
  ASSERT_DOUBLE_EQ(one->radius(0), 0.05);
  const blowup::SyntheticField f(one, blowup::constant_profile(*one, 2, 0.3, blowup::diagonal_direction(2)));
  const auto fit = fit_per_ball_constant(f, 0, 400, 1);
  EXPECT_NEAR(fit.slope, 2.0, 0.01);
  EXPECT_NEAR(fit.constant, 240.0, 0.01 * 240.0);
}

TEST(Flatness, ConformalFieldHasZeroConstant) {
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 2, 0.0, blowup::diagonal_direction(2)));
  EXPECT_EQ(fit_per_ball_constant(f, 3, 200, 1).constant, 0.0);
}

TEST(Flatness, SuperFlatRatioVanishes) {
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 3, 0.3, blowup::diagonal_direction(2)));
  const auto fit = fit_per_ball_constant(f, 0, 400, 2);
  EXPECT_NEAR(fit.slope, 3.0, 0.05);
  double small = 0.0, large = 0.0;
  const double r = sys()->radius(0);
  for (std::size_t i = 0; i < fit.ell.size(); ++i) {
    const double ratio = fit.dist[i] / (fit.ell[i] * fit.ell[i]);
    if (fit.ell[i] < 1e-2 * r) small = std::max(small, ratio);
    if (fit.ell[i] > 0.5 * r) large = std::max(large, ratio);
  }
  EXPECT_LT(small, 0.05 * large);
}

TEST(Flatness, Errors) {
  const std::vector<double> ell(10, 1e-12), dist(10, 0.0);
  try {
    fit_flatness(ell, dist, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateSamples);
  }
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 2, 0.3, blowup::diagonal_direction(2)));
  EXPECT_THROW(fit_per_ball_constant(f, 0, 50, 1), Error);
}

TEST(VolumeBound, ConformalFieldPassesTrivially) {
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 2, 0.0, blowup::diagonal_direction(2)));
  const auto r = verify_volume_bound(trace_cocycle_distortion(f, TorusPoint(sys()->center(0)), 300), 1.0);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.sup_direct, 1e-12);
}

TEST(VolumeBound, VolumeScaledAmplitudesPass) {
  const auto& s = *sys();
  for (const Matrix& dir : {blowup::diagonal_direction(2), blowup::shear_direction(2)}) {
    const blowup::SyntheticField f(sys(), blowup::volume_profile(s, 2, 1.0, dir));
    const auto tr = trace_cocycle_distortion(f, TorusPoint(s.center(0)), 2000);
    const auto r = verify_volume_bound(tr, 1.0);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(r.per_step_certified);
    EXPECT_LE(r.sup_direct, r.bound + 1e-8);
    EXPECT_LE(r.volume_sum, total_volume(s));
    EXPECT_FALSE(r.revisited_ball.has_value());
  }
}

TEST(VolumeBound, ConstantDistortionGrowsLinearlyAndFails) {
  const double delta = 0.05;
  const blowup::SyntheticField f(sys(), blowup::constant_profile(*sys(), 2, delta / 2.0, blowup::diagonal_direction(2)));
  const auto tr = trace_cocycle_distortion(f, TorusPoint(sys()->center(0)), 2000);
  for (std::size_t n = 100; n <= tr.length(); n += 50) EXPECT_GE(tr.direct[n - 1], 0.9 * delta * n);
  const auto r = verify_volume_bound(tr, 1.0);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.first_violation.has_value());
}

TEST(VolumeBound, RevisitedBallIsReported) {
  std::vector<Matrix> steps(3, diag_exp(2, 0.01));
  auto tr = trace_matrix_cocycle(steps);
  tr.ball = {1, 2, 1};
  tr.volume = {1.0, 1.0, 1.0};
  const auto r = verify_volume_bound(tr, 1.0);
  ASSERT_TRUE(r.revisited_ball.has_value());
  EXPECT_EQ(*r.revisited_ball, 1);
  EXPECT_DOUBLE_EQ(r.volume_sum, 2.0);
}

TEST(TraceTable, Columns) {
  const std::vector<Matrix> steps = {diag_exp(2, 0.1), diag_exp(2, 0.2)};
  std::ostringstream out;
  write_trace_table(out, trace_matrix_cocycle(steps));
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "step,d_i,T_n,D_n,ball_index,vol");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 2);
}
