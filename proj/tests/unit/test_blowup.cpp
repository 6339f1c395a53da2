#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "denjoy/blowup.hpp"
#include "denjoy/confspace.hpp"
#include "denjoy/error.hpp"
#include "support.hpp"

using namespace denjoy;
using namespace denjoy::blowup;

namespace {

const std::shared_ptr<const BallSystem>& sys() {
  static const auto s = fixtures::default_system();
  return s;
}

Vector random_in_ball(const BallSystem& s, int j, std::mt19937_64& rng, double fill = 0.999) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector d(s.dimension());
  for (int a = 0; a < d.size(); ++a) d(a) = g(rng);
  return s.center(j) + d * (fill * s.radius(j) * std::sqrt(u(rng)) / d.norm());
}

Vector boundary_point(const BallSystem& s, int j, double angle, double shrink = 1.0) {
  Vector d(2);
  d << std::cos(angle), std::sin(angle);
  return s.lift_center(j) + shrink * s.radius(j) * d;
}

}  // namespace

TEST(Schedule, Radii) {
  const Schedule s{0.05, 0.8};
  EXPECT_DOUBLE_EQ(s.radius(0), 0.05);
  EXPECT_DOUBLE_EQ(s.radius(-3), 0.05 / std::pow(4.0, 0.8));
  EXPECT_TRUE(s.summable(2));
  EXPECT_FALSE(Schedule({0.05, 0.4}).summable(2));
}

TEST(BuildBallSystem, SingleBall) {
  const auto s = build_ball_system(fixtures::default_theta(), 0, Schedule{0.2, 0.8}, 1.0);
  EXPECT_EQ(s.size(), 1);
  EXPECT_TRUE(s.certificate().holds);
  EXPECT_DOUBLE_EQ(s.radius(0), 0.2);
}

TEST(BuildBallSystem, BudgetRescale) {
  const double pi = std::acos(-1.0);
  const auto s = build_ball_system(fixtures::default_theta(), 0, Schedule{0.2, 0.8}, pi * 0.01);
  EXPECT_NEAR(s.radius(0), 0.1, 1e-15);
  EXPECT_LE(total_volume(s), pi * 0.01);
  ASSERT_EQ(s.repair_log().size(), 1u);
  EXPECT_EQ(s.repair_log()[0].kind, "budget");
}

TEST(BuildBallSystem, DefaultSystemIsCertified) {
  const auto& s = *sys();
  EXPECT_EQ(s.size(), 4001);
  EXPECT_TRUE(s.certificate().holds);
  EXPECT_GE(s.certificate().worst_slack, 0.0);
  EXPECT_LE(total_volume(s), 0.5 + 1e-12);
  // Independent recheck of every pair.
  const auto again = check_disjoint(s);
  EXPECT_TRUE(again.holds);
  EXPECT_EQ(again.worst_slack, s.certificate().worst_slack);
}

TEST(BuildBallSystem, RepairLogRecordsShrinks) {
  const auto& s = *sys();
  EXPECT_FALSE(s.repair_log().empty());
  for (const auto& e : s.repair_log()) {
    EXPECT_LT(e.new_radius, e.old_radius);
    EXPECT_NEAR(e.factor, e.new_radius / e.old_radius, 1e-15);
  }
}

TEST(BuildBallSystem, Errors) {
  Vector rational(2);
  rational << 0.25, 0.5;
  try {
    build_ball_system(make_translation(rational), 4, Schedule{0.01, 1.0}, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RationalOrbit);
  }
  EXPECT_THROW(build_ball_system(fixtures::default_theta(), 10, Schedule{0.6, 1.0}, 0.5), Error);
  EXPECT_THROW(build_ball_system(fixtures::default_theta(), -1, Schedule{0.05, 1.0}, 0.5), Error);
}

TEST(BuildBallSystem, Deterministic) {
  const auto a = build_ball_system(fixtures::default_theta(), 500, Schedule{0.05, 0.8}, 0.5);
  const auto b = build_ball_system(fixtures::default_theta(), 500, Schedule{0.05, 0.8}, 0.5);
  for (int j = -500; j <= 500; ++j) EXPECT_EQ(a.radius(j), b.radius(j));
  EXPECT_EQ(a.repair_log(), b.repair_log());
}

TEST(Volume, Examples) {
  const double pi = std::acos(-1.0);
  EXPECT_NEAR(ball_volume(2, 0.1), pi * 0.01, 1e-17);
  EXPECT_NEAR(ball_volume(2, 0.1) + ball_volume(2, 0.2), pi * 0.05, 1e-16);
  EXPECT_NEAR(ball_volume(3, 1.0), 4.0 * pi / 3.0, 1e-15);
}

TEST(Volume, ExtendedPrecisionOracle) {
  using boost::multiprecision::cpp_bin_float_50;
  const auto& s = *sys();
  const cpp_bin_float_50 pi = boost::math::constants::pi<cpp_bin_float_50>();
  cpp_bin_float_50 sum = 0;
  for (int j = -s.window(); j <= s.window(); ++j) {
    const cpp_bin_float_50 r = s.radius(j);
    sum += pi * r * r;
  }
  EXPECT_NEAR(total_volume(s), static_cast<double>(sum), 1e-15);
}

TEST(ChordHalfLength, Examples) {
  Vector c = Vector::Zero(2), x(2);
  EXPECT_DOUBLE_EQ(chord_half_length(c, c, 0.25), 0.25);
  // 3-4-5 scaled to fit in the torus: distances are taken mod 1.
  x << 0.15, 0.0;
  EXPECT_NEAR(chord_half_length(x, c, 0.25), 0.2, 1e-15);
  x << 0.0, -0.25;
  EXPECT_EQ(chord_half_length(x, c, 0.25), 0.0);
  x << 0.3, 0.0;
  try {
    chord_half_length(x, c, 0.25);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideBall);
  }
}

TEST(SimilarityMap, CentersAndBoundaries) {
  const SimilarityMap g(sys());
  const auto& s = *sys();
  for (int j : {-2000, -5, 0, 3, 1999}) {
    EXPECT_LE(torus_distance(g.eval(j, TorusPoint(s.center(j))).coords(), s.center(j + 1)), 1e-15);
    EXPECT_NEAR(confspace::dist_to_base(g.jacobian(TorusPoint(s.center(j)))), 0.0, 1e-15);
  }
  for (int i = 0; i < 100; ++i) {
    const double a = 2.0 * M_PI * i / 100.0;
    for (int j : {0, 17, -300}) {
      const Vector x = boundary_point(s, j, a);
      const Vector y = g.eval_lift(j, x);
      EXPECT_NEAR(torus_distance(y, s.center(j + 1)), s.radius(j + 1), 1e-12);
    }
  }
}

TEST(SimilarityMap, Errors) {
  const SimilarityMap g(sys());
  const auto& s = *sys();
  try {
    g.eval(TorusPoint(boundary_point(s, 0, 0.3, 1.5)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotInSystem);
  }
  try {
    g.eval(s.window(), TorusPoint(s.center(s.window())));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::WindowEdge);
  }
}

TEST(ComposedChain, MatchesStepwiseMaps) {
  const SimilarityMap g(sys());
  const auto& s = *sys();
  std::mt19937_64 rng(2);
  for (int n : {1, 2, 10, 100}) {
    const auto chain = composed_chain(s, 0, n);
    EXPECT_NEAR(chain.scale, s.radius(n) / s.radius(0), 1e-15);
    for (int t = 0; t < 20; ++t) {
      const Vector x = random_in_ball(s, 0, rng);
      Vector y = x;
      for (int i = 0; i < n; ++i) y = g.eval(i, TorusPoint(y)).coords();
      EXPECT_LE(torus_distance(y, chain(x)), 1e-12);
    }
  }
}

TEST(AffineSimilarity, FixedPointClosedForm) {
  AffineSimilarity a{0.5, Vector::Zero(2), Vector::Ones(2)};
  const Vector p = a.fixed_point();
  EXPECT_LE((a(p) - p).norm(), 1e-15);
  EXPECT_NEAR(p(0), 2.0, 1e-15);
}

TEST(Collapse, SemiconjugacyAndFixedOutside) {
  const SimilarityMap g(sys());
  const auto& s = *sys();
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pick(-s.window(), s.window() - 1);
  for (int t = 0; t < 1000; ++t) {
    const int j = pick(rng);
    const TorusPoint x(random_in_ball(s, j, rng));
    const auto lhs = collapse(s, g.eval(j, x));
    const TorusPoint rhs(collapse(s, x).coords() + s.theta().theta);
    EXPECT_LE(torus_distance(lhs.coords(), rhs.coords()), 1e-10);
  }
  EXPECT_LE(torus_distance(collapse(s, TorusPoint(random_in_ball(s, 0, rng))).coords(), s.seed()), 1e-15);
  const TorusPoint out(boundary_point(s, 0, 1.0, 1.01));
  ASSERT_FALSE(s.locate(out).has_value());
  EXPECT_EQ(collapse(s, out), out);
}

TEST(SyntheticField, ClosedForms) {
  const auto& s = *sys();
  const SyntheticField f(sys(), constant_profile(s, 2, 0.3, diagonal_direction(2)));
  EXPECT_NEAR(confspace::dist_to_base(f(TorusPoint(s.center(4)))), 0.6, 1e-12);
  EXPECT_NEAR(confspace::dist_to_base(f(TorusPoint(boundary_point(s, 4, 0.7)))), 0.0, 1e-6);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    const TorusPoint x(random_in_ball(s, 7, rng));
    const double d = confspace::dist_to_base(f.at(7, x));
    EXPECT_NEAR(d, f.closed_form_distance(7, x), 1e-12);
    if (d > 1e-6) {
      const double ell = chord_half_length(x.coords(), s.center(7), s.radius(7));
      EXPECT_NEAR(std::log(d) - 2.0 * std::log(ell / s.radius(7)), std::log(0.6), 1e-9);
    }
  }
}

TEST(SyntheticField, ConformalOffTheBalls) {
  const auto& s = *sys();
  const SyntheticField f(sys(), constant_profile(s, 2, 0.3, shear_direction(2)));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int outside = 0;
  while (outside < 1000) {
    const TorusPoint x(Vector{{u(rng), u(rng)}});
    if (s.locate(x)) continue;
    ++outside;
    EXPECT_EQ(confspace::dist_to_base(f(x)), 0.0);
  }
}

TEST(SyntheticField, ZeroAmplitudeMatchesSimilarity) {
  const auto& s = *sys();
  const SyntheticField f(sys(), constant_profile(s, 2, 0.0, diagonal_direction(2)));
  const SimilarityMap g(sys());
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const TorusPoint x(random_in_ball(s, 12, rng));
    EXPECT_LE((f(x) - g.jacobian(x)).norm(), 1e-15);
  }
}

TEST(DistortionProfile, DirectionInvariants) {
  for (int k : {2, 3, 5}) {
    for (const Matrix& n : {diagonal_direction(k), shear_direction(k)}) {
      EXPECT_NEAR(n.trace(), 0.0, 1e-12);
      EXPECT_NEAR(n.norm(), 1.0, 1e-12);
    }
  }
  DistortionProfile bad{2, {0.1}, Matrix::Identity(2, 2)};
  EXPECT_THROW(bad.validate(2, 0), Error);
}

TEST(BallSystemRecord, BitExactRoundTrip) {
  const auto s = build_ball_system(fixtures::default_theta(), 300, Schedule{0.05, 0.8}, 0.5);
  std::stringstream io;
  write_ball_system(io, s);
  const std::string first = io.str();
  const auto back = read_ball_system(io);
  ASSERT_EQ(back.window(), s.window());
  for (int j = -300; j <= 300; ++j) {
    EXPECT_EQ(back.radius(j), s.radius(j));
    EXPECT_EQ(back.center(j), s.center(j));
  }
  EXPECT_EQ(back.repair_log(), s.repair_log());
  EXPECT_EQ(back.budget(), s.budget());
  std::ostringstream again;
  write_ball_system(again, back);
  EXPECT_EQ(again.str(), first);
}

TEST(BallSystemRecord, RejectsMalformed) {
  const auto s = build_ball_system(fixtures::default_theta(), 3, Schedule{0.05, 0.8}, 0.5);
  std::ostringstream io;
  write_ball_system(io, s);
  const std::string good = io.str();

  auto expect_malformed = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_ball_system(in);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedRecord);
    }
  };
  expect_malformed("");
  expect_malformed(good + "{\"extra\":1}\n");
  const auto cut = good.find("\"radii\"");
  expect_malformed(good.substr(0, good.rfind('\n', cut) + 1));
  expect_malformed("{\"format\":\"denjoy.ballsystem\",\"version\":99}\n");
}
