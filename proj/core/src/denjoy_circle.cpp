#include "denjoy/denjoy_circle.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

#include "denjoy/error.hpp"

namespace denjoy::dynamics {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

DenjoyCircle::DenjoyCircle(const DenjoyParams& params) : params_(params) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  }
  if (!(params.c > 0.0) || !std::isfinite(params.c)) {
    throw Error(ErrorCode::InvalidArgument, "interval scale c must be positive");
  }
  if (params.truncation < 1) {
    throw Error(ErrorCode::InvalidArgument, "truncation must be >= 1");
  }
  if (!(params.tail_tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tail tolerance must be positive");
  }
  if (series_length() >= 1.0) {
    std::ostringstream os;
    os << "total inserted length " << series_length() << " >= 1";
    throw Error(ErrorCode::BudgetExceeded, os.str());
  }
  if (tail_bound() >= params.tail_tolerance) {
    std::ostringstream os;
    os << "tail bound 2c/N_t = " << tail_bound() << " not below tolerance " << params.tail_tolerance;
    throw Error(ErrorCode::TailTooLarge, os.str());
  }

  const std::int64_t big_n = params.truncation;
  const std::size_t count = static_cast<std::size_t>(2 * big_n + 1);
  std::vector<double> y(count);
  for (std::int64_t n = -big_n; n <= big_n; ++n) {
    y[static_cast<std::size_t>(n + big_n)] = orbit_coordinate(0.0, params.alpha, n);
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return y[a] < y[b] || (y[a] == y[b] && a < b);
  });

  ys_.resize(count);
  starts_.resize(count);
  lengths_.resize(count);
  indices_.resize(count);
  slot_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t raw = order[i];
    const std::int64_t n = static_cast<std::int64_t>(raw) - big_n;
    if (i > 0 && y[raw] == ys_[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "alpha behaves as rational: repeated orbit point");
    }
    ys_[i] = y[raw];
    indices_[i] = n;
    lengths_[i] = interval_length(n);
    slot_[raw] = i;
  }

  // Total and prefix sums in extended precision.
  long double total = 0.0L;
  for (std::size_t i = 0; i < count; ++i) total += static_cast<long double>(lengths_[i]);
  inserted_ = static_cast<double>(total);
  scale_ = 1.0 - inserted_;
  long double prefix = 0.0L;
  for (std::size_t i = 0; i < count; ++i) {
    starts_[i] = static_cast<double>(static_cast<long double>(scale_) * ys_[i] + prefix);
    prefix += static_cast<long double>(lengths_[i]);
  }
}

double DenjoyCircle::interval_length(std::int64_t n) const noexcept {
  const double nd = static_cast<double>(n);
  return params_.c / (1.0 + nd * nd);
}

double DenjoyCircle::interval_start(std::int64_t n) const {
  if (n < -params_.truncation || n > params_.truncation) {
    throw Error(ErrorCode::InvalidArgument, "interval index outside the truncation window");
  }
  return starts_[slot_[static_cast<std::size_t>(n + params_.truncation)]];
}

double DenjoyCircle::orbit_point(std::int64_t n) const {
  if (n < -params_.truncation || n > params_.truncation) {
    throw Error(ErrorCode::InvalidArgument, "orbit index outside the truncation window");
  }
  return ys_[slot_[static_cast<std::size_t>(n + params_.truncation)]];
}

double DenjoyCircle::series_length() const noexcept { return params_.c * kPi / std::tanh(kPi); }

double DenjoyCircle::tail_bound() const noexcept {
  return 2.0 * params_.c / static_cast<double>(params_.truncation);
}

DenjoyCircle::Location DenjoyCircle::locate(double z) const {
  const double w = wrap_unit(z);
  // starts_[0] == 0 (I_0 sits at the origin), so i >= 0.
  auto it = std::upper_bound(starts_.begin(), starts_.end(), w);
  const std::size_t i = static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
  Location loc;
  loc.index = indices_[i];
  const double u = w - starts_[i];
  if (u <= lengths_[i]) {
    loc.in_interval = true;
    loc.offset = u;
    loc.y = ys_[i];
  } else {
    loc.in_interval = false;
    loc.offset = (u - lengths_[i]) / scale_;
    loc.y = wrap_unit(ys_[i] + loc.offset);
  }
  return loc;
}

double DenjoyCircle::bridge_target_start(std::int64_t n, bool& wraps) const {
  const double y_n = orbit_point(n);
  if (n < params_.truncation) {
    wraps = orbit_point(n + 1) < y_n;
    return interval_start(n + 1);
  }
  // I_{N_t} bridges to the (not inserted) slot of I_{N_t + 1}.
  const double y_next = orbit_coordinate(0.0, params_.alpha, n + 1);
  wraps = y_next < y_n;
  auto it = std::lower_bound(ys_.begin(), ys_.end(), y_next);
  if (it == ys_.begin()) return scale_ * y_next;
  const std::size_t pos = static_cast<std::size_t>(std::distance(ys_.begin(), it)) - 1;
  return starts_[pos] + lengths_[pos] + scale_ * (y_next - ys_[pos]);
}

// Position of y' = y_base + delta where y_base is the image of the orbit point
// owning the gap that contains the preimage; `image_index` is that image's
// interval index (or N_t + 1 when it is not inserted).
double DenjoyCircle::position_after(double y_base, std::int64_t image_index, double delta) const {
  double y_prime = y_base + delta;
  double shift = 0.0;
  if (y_prime >= 1.0) {
    y_prime -= 1.0;
    shift = 1.0;
  }
  auto it = std::upper_bound(ys_.begin(), ys_.end(), y_prime);
  if (it == ys_.begin()) return shift + scale_ * y_prime;
  const std::size_t pos = static_cast<std::size_t>(std::distance(ys_.begin(), it)) - 1;
  double gap = y_prime - ys_[pos];
  if (shift == 0.0 && image_index <= params_.truncation && indices_[pos] == image_index) {
    gap = delta;
  }
  return shift + starts_[pos] + lengths_[pos] + scale_ * gap;
}

double DenjoyCircle::lift(double z) const {
  const double m = std::floor(z);
  const Location loc = locate(z - m);
  const std::int64_t n = loc.index;
  if (loc.in_interval) {
    bool wraps = false;
    const double target = bridge_target_start(n, wraps) + (wraps ? 1.0 : 0.0);
    const double l = interval_length(n);
    const double l_next = interval_length(n + 1);
    const double t = loc.offset / l;
    return m + target + loc.offset + (l_next - l) * t * t * (3.0 - 2.0 * t);
  }
  const double y_n = orbit_point(n);
  const double y_base = n < params_.truncation ? orbit_point(n + 1)
                                               : orbit_coordinate(0.0, params_.alpha, n + 1);
  const double wrap = y_base < y_n ? 1.0 : 0.0;
  return m + wrap + position_after(y_base, n + 1, loc.offset);
}

double DenjoyCircle::derivative(double z) const {
  const Location loc = locate(z);
  if (!loc.in_interval) return 1.0;
  const double l = interval_length(loc.index);
  const double ratio = (interval_length(loc.index + 1) - l) / l;
  const double t = loc.offset / l;
  return 1.0 + 6.0 * ratio * t * (1.0 - t);
}

double DenjoyCircle::collapse(double z) const { return locate(z).y; }

ModelMap denjoy_circle(std::shared_ptr<const DenjoyCircle> circle) {
  std::ostringstream os;
  os << "Denjoy circle map, alpha = " << circle->params().alpha << ", l_n = " << circle->params().c
     << "/(1+n^2), |n| <= " << circle->truncation();
  return ModelMap(
      1,
      [circle](const Vector& x) -> Vector {
        Vector y(1);
        y(0) = circle->lift(x(0));
        return y;
      },
      [circle](const Vector& x) -> Matrix {
        Matrix d(1, 1);
        d(0, 0) = circle->derivative(x(0));
        return d;
      },
      os.str());
}

ModelMap denjoy_circle(const DenjoyParams& params) {
  return denjoy_circle(std::make_shared<const DenjoyCircle>(params));
}

}  // namespace denjoy::dynamics

namespace denjoy::dynamics {

WanderingCheck wandering_images(const DenjoyCircle& circle, std::size_t n) {
  constexpr double kWiden = 1e-12;
  struct Arc {
    double lo;
    double hi;
  };
  std::vector<Arc> arcs;
  arcs.reserve(n + 1);
  double a = 0.0;
  double b = circle.interval_length(0);
  for (std::size_t i = 0; i <= n; ++i) {
    const double shift = std::floor(a);
    arcs.push_back(Arc{a - shift - kWiden, b - shift + kWiden});
    a = circle.lift(a);
    b = circle.lift(b);
  }
  std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) { return x.lo < y.lo; });
  WanderingCheck check;
  check.images = arcs.size();
  check.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& cur = arcs[i];
    // The last arc wraps onto the first one.
    const double next_lo = i + 1 < arcs.size() ? arcs[i + 1].lo : arcs.front().lo + 1.0;
    check.min_gap = std::min(check.min_gap, next_lo - cur.hi);
  }
  check.disjoint = check.min_gap > 0.0;
  return check;
}

double max_log_derivative(const DenjoyCircle& circle, std::size_t n, std::size_t samples) {
  if (samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two samples");
  const double l0 = circle.interval_length(0);
  double best = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double z = l0 * static_cast<double>(s) / static_cast<double>(samples - 1);
    double log_d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      log_d += std::log(circle.derivative(z));
      z = circle.lift(z);
    }
    best = std::max(best, std::abs(log_d));
  }
  return best;
}

}  // namespace denjoy::dynamics
