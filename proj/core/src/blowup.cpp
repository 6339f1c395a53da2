#include "denjoy/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "denjoy/error.hpp"

namespace denjoy::blowup {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kOrbitTolerance = 1e-12;

double torus_distance_raw(const double* a, const double* b, int k) {
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    double d = b[i] - a[i];
    d -= std::floor(d);
    if (d >= 0.5) d -= 1.0;
    sum += d * d;
  }
  return std::sqrt(sum);
}

bool clear(double dist, double ra, double rb) {
  return dist - (ra + rb) >= kRelativeClearance * std::min(ra, rb);
}

// Largest rb' <= rb with clear(dist, ra, rb').
double restore_clearance(double dist, double ra, double rb) {
  double candidate = (dist - ra) / (1.0 + kRelativeClearance);
  if (candidate > ra) candidate = dist - ra - kRelativeClearance * ra;
  candidate = std::min(candidate, rb);
  while (candidate > 0.0 && !clear(dist, ra, candidate)) {
    candidate = std::nextafter(candidate, 0.0);
  }
  return candidate;
}

std::vector<int> placement_order(int window) {
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(2 * window + 1));
  order.push_back(0);
  for (int m = 1; m <= window; ++m) {
    order.push_back(-m);
    order.push_back(m);
  }
  return order;
}

void check_theta(const TranslationVector& theta, const Vector& seed) {
  if (theta.dimension() < 2) {
    throw Error(ErrorCode::InvalidArgument, "ball systems need dimension k >= 2");
  }
  if (seed.size() != theta.theta.size()) {
    throw Error(ErrorCode::DimensionMismatch, "seed and translation differ in dimension");
  }
}

}  // namespace

double Schedule::radius(int j) const { return c_r / std::pow(1.0 + std::abs(j), p); }

double ball_volume(int k, double r) {
  const double half = 0.5 * k;
  return std::pow(kPi, half) * std::pow(r, k) / std::tgamma(half + 1.0);
}

std::size_t BallSystem::slot(int j) const {
  if (!contains_index(j)) {
    std::ostringstream os;
    os << "ball index " << j << " outside window [-" << window_ << ", " << window_ << "]";
    throw Error(ErrorCode::WindowEdge, os.str());
  }
  return static_cast<std::size_t>(j + window_);
}

Vector BallSystem::center(int j) const { return centers_.col(static_cast<Eigen::Index>(slot(j))); }

Vector BallSystem::lift_center(int j) const {
  slot(j);
  return orbit_lift(seed_, theta_.theta, j);
}

double BallSystem::radius(int j) const { return radii_[slot(j)]; }

double BallSystem::volume(int j) const { return ball_volume(dimension(), radius(j)); }

std::optional<int> BallSystem::locate(const TorusPoint& x) const {
  if (x.dimension() != dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "point and ball system differ in dimension");
  }
  const int k = dimension();
  const double* px = x.coords().data();
  for (int s = 0; s < size(); ++s) {
    const double r = radii_[static_cast<std::size_t>(s)];
    if (torus_distance_raw(centers_.col(s).data(), px, k) <= r * (1.0 + 1e-12)) {
      return s - window_;
    }
  }
  return std::nullopt;
}

void BallSystem::certify() { certificate_ = check_disjoint(*this); }

DisjointnessCertificate check_disjoint(const BallSystem& system) {
  DisjointnessCertificate cert;
  cert.holds = true;
  cert.worst_slack = std::numeric_limits<double>::infinity();
  const int k = system.dimension();
  const int J = system.window();
  std::vector<Vector> centers;
  std::vector<double> radii;
  for (int j = -J; j <= J; ++j) {
    centers.push_back(system.center(j));
    radii.push_back(system.radius(j));
  }
  for (std::size_t a = 0; a < centers.size(); ++a) {
    for (std::size_t b = a + 1; b < centers.size(); ++b) {
      const double d = torus_distance_raw(centers[a].data(), centers[b].data(), k);
      const double slack =
          d - (radii[a] + radii[b]) - kRelativeClearance * std::min(radii[a], radii[b]);
      if (slack < cert.worst_slack) {
        cert.worst_slack = slack;
        cert.worst_i = static_cast<int>(a) - J;
        cert.worst_j = static_cast<int>(b) - J;
      }
      if (slack < 0.0) cert.holds = false;
    }
  }
  if (centers.size() < 2) cert.worst_slack = 0.0;
  return cert;
}

double total_volume(const BallSystem& system) {
  if (!system.certificate().holds) {
    throw Error(ErrorCode::NotDisjoint, "ball system carries no disjointness certificate");
  }
  // Neumaier summation.
  double sum = 0.0;
  double comp = 0.0;
  for (int j = -system.window(); j <= system.window(); ++j) {
    const double v = system.volume(j);
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

BallSystem build_ball_system(const TranslationVector& theta, int window, const Schedule& schedule,
                             double v_max, const Vector& seed) {
  check_theta(theta, seed);
  if (window < 0) throw Error(ErrorCode::InvalidArgument, "window J must be >= 0");
  if (!(schedule.c_r > 0.0 && schedule.c_r < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "c_r must lie in (0, 1/2) so balls embed in the torus");
  }
  if (!(schedule.p >= 0.0) || !std::isfinite(schedule.p)) {
    throw Error(ErrorCode::InvalidArgument, "schedule exponent p must be >= 0");
  }
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw Error(ErrorCode::InvalidArgument, "volume budget must be positive");
  }

  const int k = theta.dimension();
  const int n = 2 * window + 1;
  BallSystem s;
  s.theta_ = theta;
  s.seed_ = TorusPoint(seed).coords();
  s.window_ = window;
  s.budget_ = v_max;
  s.centers_.resize(k, n);
  s.radii_.resize(static_cast<std::size_t>(n));
  for (int j = -window; j <= window; ++j) {
    s.centers_.col(j + window) = orbit_point(s.seed_, theta.theta, j);
    s.radii_[static_cast<std::size_t>(j + window)] = schedule.radius(j);
  }

  std::vector<int> placed;
  placed.reserve(static_cast<std::size_t>(n));
  for (int j : placement_order(window)) {
    const int sj = j + window;
    double& rj = s.radii_[static_cast<std::size_t>(sj)];
    for (int i : placed) {
      const int si = i + window;
      const double ri = s.radii_[static_cast<std::size_t>(si)];
      const double d = torus_distance_raw(s.centers_.col(si).data(), s.centers_.col(sj).data(), k);
      if (d < kCoincidenceTolerance) {
        std::ostringstream os;
        os << "centers " << i << " and " << j << " coincide (distance " << d << ")";
        throw Error(ErrorCode::RationalOrbit, os.str());
      }
      if (clear(d, ri, rj)) continue;
      // Shrink whichever of the pair keeps the larger fraction of its radius.
      // Shrinking a placed ball only widens its earlier clearances.
      const double own = restore_clearance(d, ri, rj);
      const double other = restore_clearance(d, rj, ri);
      const bool shrink_new = own / rj >= other / ri;
      const double shrunk = shrink_new ? own : other;
      if (!(shrunk >= kMinRadius)) {
        std::ostringstream os;
        os << "balls " << i << " and " << j << " cannot be separated above radius " << kMinRadius;
        throw Error(ErrorCode::InfeasibleWindow, os.str());
      }
      if (shrink_new) {
        s.repair_log_.push_back(RepairEntry{"clearance", j, i, rj, shrunk, shrunk / rj});
        rj = shrunk;
      } else {
        s.repair_log_.push_back(RepairEntry{"clearance", i, j, ri, shrunk, shrunk / ri});
        s.radii_[static_cast<std::size_t>(si)] = shrunk;
      }
    }
    placed.push_back(j);
  }

  double volume = 0.0;
  for (double r : s.radii_) volume += ball_volume(k, r);
  if (volume > v_max) {
    const double factor = std::pow(v_max / volume, 1.0 / k);
    const double r0 = s.radii_[static_cast<std::size_t>(window)];
    for (double& r : s.radii_) r *= factor;
    auto recompute = [&] {
      double v = 0.0;
      for (double r : s.radii_) v += ball_volume(k, r);
      return v;
    };
    double applied = factor;
    while (recompute() > v_max) {
      for (double& r : s.radii_) r *= (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
      applied *= (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    }
    s.repair_log_.push_back(RepairEntry{"budget", 0, 0, r0, s.radii_[static_cast<std::size_t>(window)], applied});
    for (double r : s.radii_) {
      if (r < kMinRadius) throw Error(ErrorCode::InfeasibleWindow, "budget rescale shrinks a ball below 1e-12");
    }
  }

  s.certify();
  if (!s.certificate_.holds) {
    throw Error(ErrorCode::NotDisjoint, "greedy repair failed to certify disjointness");
  }
  return s;
}

BallSystem build_ball_system(const TranslationVector& theta, int window, const Schedule& schedule,
                             double v_max) {
  return build_ball_system(theta, window, schedule, v_max, Vector::Zero(theta.dimension()));
}

BallSystem BallSystem::from_parts(const TranslationVector& theta, const Vector& seed, int window,
                                  const std::vector<Vector>& centers,
                                  const std::vector<double>& radii, double budget,
                                  std::vector<RepairEntry> repair_log) {
  check_theta(theta, seed);
  const int k = theta.dimension();
  const std::size_t n = static_cast<std::size_t>(2 * window + 1);
  if (window < 0 || centers.size() != n || radii.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "centers and radii must cover the window -J..J");
  }
  BallSystem s;
  s.theta_ = theta;
  s.seed_ = seed;
  s.window_ = window;
  s.budget_ = budget;
  s.centers_.resize(k, static_cast<Eigen::Index>(n));
  s.radii_ = radii;
  s.repair_log_ = std::move(repair_log);
  for (std::size_t i = 0; i < n; ++i) {
    if (centers[i].size() != k) throw Error(ErrorCode::DimensionMismatch, "center dimension");
    if (!(radii[i] > 0.0 && radii[i] < 0.5)) {
      throw Error(ErrorCode::InvalidArgument, "radii must lie in (0, 1/2)");
    }
    s.centers_.col(static_cast<Eigen::Index>(i)) = centers[i];
    const int j = static_cast<int>(i) - window;
    if (torus_distance(centers[i], orbit_point(seed, theta.theta, j)) > kOrbitTolerance) {
      std::ostringstream os;
      os << "center " << j << " is not on the translation orbit of the seed";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  s.certify();
  if (!s.certificate_.holds) {
    std::ostringstream os;
    os << "balls " << s.certificate_.worst_i << " and " << s.certificate_.worst_j << " overlap";
    throw Error(ErrorCode::NotDisjoint, os.str());
  }
  double volume = 0.0;
  for (double r : radii) volume += ball_volume(k, r);
  if (volume > budget + 1e-12) {
    throw Error(ErrorCode::BudgetExceeded, "total ball volume exceeds the budget");
  }
  return s;
}

double chord_half_length(const Vector& x, const Vector& center, double radius) {
  const double d = torus_distance(center, x);
  if (d > radius * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "point at distance " << d << " from a ball of radius " << radius;
    throw Error(ErrorCode::OutsideBall, os.str());
  }
  const double gap = std::max(0.0, radius - d);
  return std::sqrt(gap * (radius + d));
}

// ---------------------------------------------------------------------------

SimilarityMap::SimilarityMap(std::shared_ptr<const BallSystem> system) : system_(std::move(system)) {
  if (!system_) throw Error(ErrorCode::InvalidArgument, "similarity map needs a ball system");
}

double SimilarityMap::ratio(int j) const {
  if (j >= system_->window()) {
    throw Error(ErrorCode::WindowEdge, "last ball of the window has no successor");
  }
  return system_->radius(j + 1) / system_->radius(j);
}

int SimilarityMap::require_ball(const TorusPoint& x) const {
  const auto j = system_->locate(x);
  if (!j) throw Error(ErrorCode::NotInSystem, "point lies outside every ball");
  return *j;
}

TorusPoint SimilarityMap::eval(const TorusPoint& x) const { return eval(require_ball(x), x); }

TorusPoint SimilarityMap::eval(int j, const TorusPoint& x) const {
  const double rho = ratio(j);
  const Vector c = system_->center(j);
  return TorusPoint(system_->center(j + 1) + rho * minimal_displacement(c, x.coords()));
}

Vector SimilarityMap::eval_lift(int j, const Vector& x) const {
  const double rho = ratio(j);
  return system_->lift_center(j + 1) + rho * (x - system_->lift_center(j));
}

Matrix SimilarityMap::jacobian(const TorusPoint& x) const {
  const int j = require_ball(x);
  const int k = system_->dimension();
  return ratio(j) * Matrix::Identity(k, k);
}

Vector AffineSimilarity::fixed_point() const {
  if (scale == 1.0) throw Error(ErrorCode::SingularMatrix, "unit-scale similarity has no unique fixed point");
  return (target - scale * source) / (1.0 - scale);
}

AffineSimilarity composed_chain(const BallSystem& system, int j, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "chain length must be >= 0");
  if (!system.contains_index(j) || !system.contains_index(j + n)) {
    throw Error(ErrorCode::WindowEdge, "chain leaves the ball window");
  }
  AffineSimilarity g;
  g.source = system.lift_center(j);
  g.target = g.source + minimal_displacement(system.center(j), system.center(j + n));
  g.scale = system.radius(j + n) / system.radius(j);
  return g;
}

TorusPoint collapse(const BallSystem& system, const TorusPoint& x) {
  const auto j = system.locate(x);
  return j ? TorusPoint(system.center(*j)) : x;
}

// ---------------------------------------------------------------------------

double DistortionProfile::amplitude(int j, int window) const {
  return amplitudes.at(static_cast<std::size_t>(j + window));
}

void DistortionProfile::validate(int k, int window) const {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "flatness order m must be >= 1");
  if (amplitudes.size() != static_cast<std::size_t>(2 * window + 1)) {
    throw Error(ErrorCode::InvalidArgument, "one amplitude per ball is required");
  }
  if (direction.rows() != k || direction.cols() != k) {
    throw Error(ErrorCode::DimensionMismatch, "direction must be k x k");
  }
  if ((direction - direction.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "direction must be symmetric");
  }
  if (std::abs(direction.trace()) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "direction must be traceless");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "direction must have unit Frobenius norm");
  }
}

Matrix diagonal_direction(int k) {
  Matrix n = Matrix::Zero(k, k);
  n(0, 0) = 1.0 / std::sqrt(2.0);
  n(1, 1) = -1.0 / std::sqrt(2.0);
  return n;
}

Matrix shear_direction(int k) {
  Matrix n = Matrix::Zero(k, k);
  n(0, 1) = n(1, 0) = 1.0 / std::sqrt(2.0);
  return n;
}

DistortionProfile constant_profile(const BallSystem& system, int order, double eps,
                                   const Matrix& direction) {
  DistortionProfile p{order, std::vector<double>(static_cast<std::size_t>(system.size()), eps), direction};
  p.validate(system.dimension(), system.window());
  return p;
}

DistortionProfile volume_profile(const BallSystem& system, int order, double eps0,
                                 const Matrix& direction) {
  DistortionProfile p{order, {}, direction};
  p.amplitudes.reserve(static_cast<std::size_t>(system.size()));
  for (int j = -system.window(); j <= system.window(); ++j) {
    p.amplitudes.push_back(0.5 * eps0 * system.volume(j));
  }
  p.validate(system.dimension(), system.window());
  return p;
}

SyntheticField::SyntheticField(std::shared_ptr<const BallSystem> system, DistortionProfile profile)
    : system_(std::move(system)), profile_(std::move(profile)) {
  if (!system_) throw Error(ErrorCode::InvalidArgument, "synthetic field needs a ball system");
  profile_.validate(system_->dimension(), system_->window());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(profile_.direction);
  eigvecs_ = eig.eigenvectors();
  eigvals_ = eig.eigenvalues();
}

Matrix SyntheticField::operator()(const TorusPoint& x) const {
  const auto j = system_->locate(x);
  if (!j) {
    const int k = system_->dimension();
    return Matrix::Identity(k, k);
  }
  return at(*j, x);
}

Matrix SyntheticField::at(int j, const TorusPoint& x) const {
  if (j >= system_->window()) {
    throw Error(ErrorCode::WindowEdge, "last ball of the window has no successor");
  }
  const double r = system_->radius(j);
  const double ell = chord_half_length(x.coords(), system_->center(j), r);
  const double s = profile_.amplitude(j, system_->window()) * std::pow(ell / r, profile_.order);
  const double rho = system_->radius(j + 1) / r;
  const Vector e = (s * eigvals_).array().exp();
  return rho * (eigvecs_ * e.asDiagonal() * eigvecs_.transpose());
}

double SyntheticField::closed_form_distance(int j, const TorusPoint& x) const {
  const double r = system_->radius(j);
  const double ell = chord_half_length(x.coords(), system_->center(j), r);
  return 2.0 * std::abs(profile_.amplitude(j, system_->window())) * std::pow(ell / r, profile_.order);
}

}  // namespace denjoy::blowup
