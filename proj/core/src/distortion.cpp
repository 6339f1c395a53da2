#include "denjoy/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <set>

#include "denjoy/confspace.hpp"
#include "denjoy/error.hpp"

namespace denjoy::distortion {

namespace {

constexpr double kPerStepTolerance = 1e-12;

// Keeps the running product at unit |det|; dist_to_base is scale invariant.
void renormalize(Matrix& p) {
  const double det = std::abs(p.determinant());
  p /= std::pow(det, 1.0 / static_cast<double>(p.rows()));
}

void push_step(DistortionTrace& trace, const Matrix& step, Matrix& product) {
  const double d = confspace::dist_to_base(step);
  product = step * product;
  renormalize(product);
  const double previous = trace.telescoped.empty() ? 0.0 : trace.telescoped.back();
  trace.step_distance.push_back(d);
  trace.telescoped.push_back(previous + d);
  trace.direct.push_back(confspace::dist_to_base(product));
}

}  // namespace

DistortionTrace trace_matrix_cocycle(std::span<const Matrix> steps) {
  DistortionTrace trace;
  if (steps.empty()) return trace;
  const auto k = steps.front().rows();
  trace.start = TorusPoint(Vector::Zero(k));
  Matrix product = Matrix::Identity(k, k);
  for (const Matrix& a : steps) {
    if (a.rows() != k || a.cols() != k) {
      throw Error(ErrorCode::DimensionMismatch, "cocycle steps differ in dimension");
    }
    push_step(trace, a, product);
    trace.ball.push_back(std::nullopt);
    trace.volume.push_back(0.0);
  }
  return trace;
}

DistortionTrace trace_cocycle_distortion(const blowup::SyntheticField& field, const TorusPoint& x,
                                         std::size_t n) {
  const blowup::BallSystem& system = field.system();
  const int k = system.dimension();
  std::optional<int> j = system.locate(x);
  if (j && *j + static_cast<long long>(n) > system.window()) {
    throw Error(ErrorCode::WindowEdge, "orbit leaves the ball window before n steps");
  }

  DistortionTrace trace;
  trace.start = x;
  Matrix product = Matrix::Identity(k, k);
  TorusPoint p = x;
  const Vector& theta = system.theta().theta;
  for (std::size_t i = 0; i < n; ++i) {
    if (j) {
      const int b = *j;
      push_step(trace, field.at(b, p), product);
      trace.ball.push_back(b);
      trace.volume.push_back(system.volume(b));
      const double rho = system.radius(b + 1) / system.radius(b);
      p = TorusPoint(system.center(b + 1) + rho * minimal_displacement(system.center(b), p.coords()));
      j = b + 1;
    } else {
      push_step(trace, Matrix::Identity(k, k), product);
      trace.ball.push_back(std::nullopt);
      trace.volume.push_back(0.0);
      p = TorusPoint(p.coords() + theta);
    }
  }
  return trace;
}

FlatnessFit fit_flatness(std::span<const double> ell, std::span<const double> dist, int k) {
  if (ell.size() != dist.size()) throw Error(ErrorCode::InvalidArgument, "sample arrays differ in size");
  FlatnessFit fit;
  fit.samples = ell.size();
  fit.ell.assign(ell.begin(), ell.end());
  fit.dist.assign(dist.begin(), dist.end());
  if (std::none_of(ell.begin(), ell.end(), [](double l) { return l >= 1e-9; })) {
    throw Error(ErrorCode::DegenerateSamples, "every sample has chord half-length below 1e-9");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ell.size(); ++i) {
    if (ell[i] < 1e-9) continue;
    fit.constant = std::max(fit.constant, dist[i] / std::pow(ell[i], k));
    if (dist[i] <= 0.0) continue;
    const double lx = std::log(ell[i]);
    const double ly = std::log(dist[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.regressed;
  }
  if (fit.regressed >= 2) {
    const double m = static_cast<double>(fit.regressed);
    const double denom = m * sxx - sx * sx;
    if (denom > 0.0) {
      fit.slope = (m * sxy - sx * sy) / denom;
      fit.intercept = (sy - fit.slope * sx) / m;
    }
  }
  return fit;
}

FlatnessFit fit_per_ball_constant(const blowup::SyntheticField& field, int j, std::size_t samples,
                                  std::uint64_t seed) {
  if (samples < 100) throw Error(ErrorCode::InvalidArgument, "flatness fit needs at least 100 samples");
  const blowup::BallSystem& system = field.system();
  const int k = system.dimension();
  const double r = system.radius(j);
  const Vector c = system.center(j);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> ell;
  std::vector<double> dist;
  ell.reserve(samples);
  dist.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = (static_cast<double>(i) + unit(rng)) / static_cast<double>(samples);
    const double ratio = std::pow(10.0, -3.0 * u);
    Vector dir(k);
    for (int a = 0; a < k; ++a) dir(a) = gauss(rng);
    dir.normalize();
    const double radial = r * std::sqrt((1.0 - ratio) * (1.0 + ratio));
    const TorusPoint x(c + radial * dir);
    ell.push_back(blowup::chord_half_length(x.coords(), c, r));
    dist.push_back(confspace::dist_to_base(field.at(j, x)));
  }
  return fit_flatness(ell, dist, k);
}

VolumeBoundReport verify_volume_bound(const DistortionTrace& trace, double constant) {
  if (!(constant >= 0.0)) throw Error(ErrorCode::InvalidArgument, "M must be non-negative");
  VolumeBoundReport report;
  report.per_step_certified = true;
  std::set<int> seen;
  double volume = 0.0;
  for (std::size_t i = 0; i < trace.length(); ++i) {
    const double d = trace.step_distance[i];
    const double v = trace.volume[i];
    if (d > constant * v + kPerStepTolerance && !report.first_violation) {
      report.first_violation = i;
      report.per_step_certified = false;
    }
    if (v > 0.0) {
      report.best_constant = std::max(report.best_constant, d / v);
    } else if (d > kPerStepTolerance) {
      report.best_constant = std::numeric_limits<double>::infinity();
    }
    if (trace.ball[i]) {
      if (seen.insert(*trace.ball[i]).second) {
        volume += v;
      } else if (!report.revisited_ball) {
        report.revisited_ball = trace.ball[i];
      }
    }
    report.sup_direct = std::max(report.sup_direct, trace.direct[i]);
  }
  report.volume_sum = volume;
  report.bound = constant * volume;
  report.margin = report.bound - report.sup_direct;
  report.pass = report.per_step_certified && !report.revisited_ball &&
                report.sup_direct <= report.bound + kTelescopeTolerance;
  return report;
}

double volume_sum(const blowup::BallSystem& system) { return blowup::total_volume(system); }

void write_trace_table(std::ostream& out, const DistortionTrace& trace) {
  out << "step,d_i,T_n,D_n,ball_index,vol\n";
  char buf[256];
  for (std::size_t i = 0; i < trace.length(); ++i) {
    const std::string ball = trace.ball[i] ? std::to_string(*trace.ball[i]) : std::string();
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%s,%.17g\n", i + 1, trace.step_distance[i],
                  trace.telescoped[i], trace.direct[i], ball.c_str(), trace.volume[i]);
    out << buf;
  }
}

}  // namespace denjoy::distortion
