#include "denjoy/trap.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "denjoy/error.hpp"

namespace denjoy::trap {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::size_t kPicardSteps = 10000;
constexpr std::size_t kDampedSteps = 100000;

std::vector<Vector> sphere_directions(int k, std::size_t count, std::mt19937_64& rng) {
  std::vector<Vector> dirs;
  dirs.reserve(count);
  if (k == 1) {
    for (std::size_t i = 0; i < count; ++i) dirs.push_back(Vector::Constant(1, i % 2 ? -1.0 : 1.0));
    return dirs;
  }
  if (k == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
      Vector d(2);
      d << std::cos(t), std::sin(t);
      dirs.push_back(d);
    }
    return dirs;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (dirs.size() < count) {
    Vector d(k);
    for (int a = 0; a < k; ++a) d(a) = gauss(rng);
    const double n = d.norm();
    if (n > 1e-12) dirs.push_back(d / n);
  }
  return dirs;
}

// Points of a cubic grid lying in the unit ball.
std::vector<Vector> unit_ball_grid(int k) {
  const int per_axis = k <= 3 ? 9 : 5;
  std::vector<Vector> pts;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Vector p(k);
    for (int a = 0; a < k; ++a) p(a) = -1.0 + 2.0 * idx[static_cast<std::size_t>(a)] / (per_axis - 1);
    if (p.norm() <= 1.0) pts.push_back(p);
    int a = 0;
    while (a < k && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == k) break;
  }
  return pts;
}

Vector apply_checked(const LiftMap& g, const Vector& x) {
  Vector y;
  try {
    y = g(x);
  } catch (const Error& e) {
    throw Error(ErrorCode::UndefinedAtSample, e.what());
  }
  if (y.size() != x.size() || !y.allFinite()) {
    throw Error(ErrorCode::UndefinedAtSample, "map returned an invalid point");
  }
  return y;
}

nlohmann::json vec_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

}  // namespace

void TrapParams::validate() const {
  if (!(lambda > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
  if (!(lambda_prime > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda' must exceed 1");
  if (horizon < 1) throw Error(ErrorCode::InvalidArgument, "horizon must be >= 1");
  if (boundary_samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one boundary sample");
  if (!(inclusion_margin >= 0.0)) throw Error(ErrorCode::InvalidArgument, "inclusion margin must be >= 0");
}

LambdaPrimeEstimate estimate_lambda_prime(const LiftMap& g, const Vector& x0, double alpha,
                                          const Vector& y0, double beta, double lambda,
                                          std::size_t samples, std::uint64_t seed) {
  if (!(lambda > 1.0)) throw Error(ErrorCode::InvalidArgument, "lambda must exceed 1");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "radii must be positive");
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  const int k = static_cast<int>(x0.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double big = lambda * alpha;

  LambdaPrimeEstimate est;
  auto probe = [&](const Vector& x) {
    const Vector y = apply_checked(g, x);
    est.raw = std::max(est.raw, (y - y0).norm() / beta);
    ++est.samples;
  };
  for (const Vector& d : sphere_directions(k, samples, rng)) probe(x0 + big * d);
  for (const Vector& d : sphere_directions(k, samples, rng)) {
    probe(x0 + big * std::pow(unit(rng), 1.0 / k) * d);
  }
  est.inflated = kLambdaPrimeSafety * est.raw;
  return est;
}

Thresholds schwartz_thresholds(double lambda, double lambda_prime, double alpha0) {
  return Thresholds{(lambda - 1.0) * alpha0 / (2.0 * lambda_prime),
                    alpha0 + 0.5 * (lambda - 1.0) * alpha0};
}

TrapSearch find_trap_time(const blowup::BallSystem& system, const TrapParams& params) {
  params.validate();
  if (params.horizon > system.window()) {
    std::ostringstream os;
    os << "horizon " << params.horizon << " exceeds the ball window " << system.window();
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
  TrapSearch s;
  s.alpha0 = system.radius(0);
  s.thresholds = schwartz_thresholds(params.lambda, params.lambda_prime, s.alpha0);
  s.near_miss_score = std::numeric_limits<double>::infinity();
  const Vector c0 = system.center(0);
  for (int n = 1; n <= params.horizon; ++n) {
    const double alpha_n = system.radius(n);
    const double disp = minimal_displacement(c0, system.center(n)).norm();
    const double score =
        std::max(alpha_n / s.thresholds.radius, disp / s.thresholds.displacement);
    if (score < s.near_miss_score) {
      s.near_miss_score = score;
      s.near_miss_n = n;
      s.near_miss_alpha = alpha_n;
      s.near_miss_displacement = disp;
    }
    if (alpha_n < s.thresholds.radius && disp < s.thresholds.displacement) {
      s.found = true;
      s.n = n;
      s.alpha_n = alpha_n;
      s.displacement = disp;
      s.near_miss_score = score;
      s.near_miss_n = n;
      s.near_miss_alpha = alpha_n;
      s.near_miss_displacement = disp;
      break;
    }
  }
  return s;
}

InclusionCheck verify_inclusion(const LiftMap& g, const Vector& center, double radius,
                                const TrapParams& params) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  const int k = static_cast<int>(center.size());
  std::mt19937_64 rng(params.seed);
  InclusionCheck check;
  check.worst_margin = std::numeric_limits<double>::infinity();
  auto probe = [&](const Vector& x) {
    const Vector y = apply_checked(g, x);
    check.worst_margin = std::min(check.worst_margin, radius - (y - center).norm());
    ++check.samples;
  };
  for (const Vector& d : sphere_directions(k, params.boundary_samples, rng)) probe(center + radius * d);
  for (const Vector& p : unit_ball_grid(k)) probe(center + radius * p);
  check.verified = check.worst_margin > params.inclusion_margin;
  return check;
}

FixedPointResult locate_fixed_point(const LiftMap& g, const Vector& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be positive");
  FixedPointResult result;
  Vector x = center;
  Vector gx = apply_checked(g, x);
  double res = (gx - x).norm();
  Vector best = x;
  double best_res = res;

  std::size_t it = 0;
  for (; it < kPicardSteps && res >= kFixedPointTolerance; ++it) {
    x = gx;
    gx = apply_checked(g, x);
    res = (gx - x).norm();
    if (res < best_res) {
      best_res = res;
      best = x;
    }
  }
  if (best_res >= kFixedPointTolerance) {
    result.damped = true;
    double s = 0.5;
    x = best;
    gx = apply_checked(g, x);
    res = best_res;
    for (std::size_t d = 0; d < kDampedSteps && res >= kFixedPointTolerance && s > 1e-12; ++d, ++it) {
      const Vector trial = (1.0 - s) * x + s * gx;
      const Vector g_trial = apply_checked(g, trial);
      const double trial_res = (g_trial - trial).norm();
      if (trial_res < res) {
        x = trial;
        gx = g_trial;
        res = trial_res;
      } else {
        s *= 0.5;
      }
    }
    if (res < best_res) {
      best_res = res;
      best = x;
    }
  }
  result.point = best;
  result.residual = (apply_checked(g, best) - best).norm();
  result.converged = result.residual < kFixedPointTolerance;
  result.iterations = it;
  return result;
}

TrapCertificate certify_trap(const blowup::BallSystem& system, TrapParams params) {
  TrapCertificate cert;
  cert.seed = params.seed;
  cert.lambda = params.lambda;

  const blowup::AffineSimilarity step = blowup::composed_chain(system, 0, 1);
  const LambdaPrimeEstimate est =
      estimate_lambda_prime(step, step.source, system.radius(0), step.target, system.radius(1),
                            params.lambda, params.boundary_samples, params.seed);
  params.lambda_prime = est.inflated;
  cert.lambda_prime_raw = est.raw;
  cert.lambda_prime = est.inflated;

  cert.search = find_trap_time(system, params);
  cert.alpha0 = cert.search.alpha0;
  cert.threshold_radius = cert.search.thresholds.radius;
  cert.threshold_displacement = cert.search.thresholds.displacement;
  if (!cert.search.found) return cert;

  cert.n = cert.search.n;
  cert.alpha_n = cert.search.alpha_n;
  cert.displacement = cert.search.displacement;
  const double trap_radius = params.lambda * cert.alpha0;
  cert.chain_margin = trap_radius - (cert.displacement + cert.lambda_prime * cert.alpha_n);

  const blowup::AffineSimilarity chain = blowup::composed_chain(system, 0, cert.n);
  const InclusionCheck inc = verify_inclusion(chain, chain.source, trap_radius, params);
  cert.inclusion_verified = inc.verified;
  cert.inclusion_worst_margin = inc.worst_margin;
  cert.inclusion_samples = inc.samples;

  const FixedPointResult fp = locate_fixed_point(chain, chain.source, trap_radius);
  cert.fixed_point = fp.point;
  cert.fixed_point_residual = fp.residual;
  cert.fixed_point_converged = fp.converged;
  cert.closed_form_fixed_point = chain.fixed_point();
  cert.fixed_point_error = (fp.point - cert.closed_form_fixed_point).norm();
  return cert;
}

ContradictionReport contradiction_report(const blowup::BallSystem& system, const TrapParams& params,
                                         const TrapCertificate& certificate, int minimality_horizon,
                                         const std::optional<distortion::VolumeBoundReport>& volume_bound) {
  std::vector<std::string> missing;
  if (!certificate.search.found) missing.push_back("no trap time within the horizon");
  if (certificate.search.found && !certificate.inclusion_verified) missing.push_back("inclusion not verified");
  if (certificate.search.found && !certificate.valid()) missing.push_back("trap inequalities not met");
  if (minimality_horizon < 1) missing.push_back("minimality horizon must be >= 1");
  if (!missing.empty()) {
    std::string what;
    for (const auto& m : missing) what += (what.empty() ? "" : "; ") + m;
    throw Error(ErrorCode::IncompleteEvidence, what);
  }

  ContradictionReport r;
  r.minimality_horizon = minimality_horizon;
  r.closest_return = std::numeric_limits<double>::infinity();
  const Vector& seed = system.seed();
  const Vector& theta = system.theta().theta;
  for (int n = 1; n <= minimality_horizon; ++n) {
    const double d = torus_distance(seed, orbit_point(seed, theta, n));
    if (d < r.closest_return) {
      r.closest_return = d;
      r.closest_return_time = n;
    }
  }
  r.minimality_evidence = system.theta().declared_irrational && r.closest_return > kReturnTolerance;

  r.period = certificate.n;
  r.located = certificate.fixed_point_converged;
  r.point = certificate.fixed_point;
  r.residual = certificate.fixed_point_residual;
  // Inclusion alone certifies existence (Brouwer); location is a bonus.
  r.periodic_point = certificate.inclusion_verified;

  r.wandering_balls = system.certificate().holds;
  if (volume_bound) r.bounded_distortion = volume_bound->pass;
  r.contradiction = r.minimality_evidence && r.periodic_point && r.wandering_balls &&
                    r.bounded_distortion.value_or(true);

  std::ostringstream c1, c2, c3;
  c1 << "(i) translation orbit: closest return to the seed within " << minimality_horizon
     << " steps is " << r.closest_return << " at n = " << r.closest_return_time
     << (r.minimality_evidence ? " -> no periodic orbit (minimality evidence)"
                               : " -> periodic or undeclared orbit, minimality not supported");
  c2 << "(ii) f^" << r.period << " maps the closed ball B(x0, " << params.lambda << " a0) into itself "
     << "(worst margin " << certificate.inclusion_worst_margin << "); fixed point "
     << (r.located ? "located" : "not located numerically") << " with residual " << r.residual;
  c3 << "(iii) wandering Euclidean balls " << (r.wandering_balls ? "certified" : "NOT certified")
     << ", bounded conformal distortion "
     << (r.bounded_distortion ? (*r.bounded_distortion ? "certified" : "NOT certified") : "not supplied")
     << ", semiconjugacy to a minimal translation"
     << (r.contradiction ? ": jointly contradictory (periodic point vs. minimality)"
                         : ": no contradiction flagged");
  r.clauses = {c1.str(), c2.str(), c3.str()};
  return r;
}

std::string certificate_record(const TrapCertificate& c) {
  nlohmann::json j;
  j["record"] = "trap_certificate";
  j["seed"] = c.seed;
  j["lambda"] = c.lambda;
  j["lambda_prime_raw"] = c.lambda_prime_raw;
  j["lambda_prime"] = c.lambda_prime;
  j["found"] = c.search.found;
  j["n"] = c.n;
  j["alpha0"] = c.alpha0;
  j["alpha_n"] = c.alpha_n;
  j["threshold_radius"] = c.threshold_radius;
  j["displacement"] = c.displacement;
  j["threshold_displacement"] = c.threshold_displacement;
  j["chain_margin"] = c.chain_margin;
  j["inclusion_verified"] = c.inclusion_verified;
  j["inclusion_worst_margin"] = c.inclusion_worst_margin;
  j["inclusion_samples"] = c.inclusion_samples;
  j["fixed_point"] = vec_json(c.fixed_point);
  j["fixed_point_residual"] = c.fixed_point_residual;
  j["fixed_point_converged"] = c.fixed_point_converged;
  j["closed_form_fixed_point"] = vec_json(c.closed_form_fixed_point);
  j["fixed_point_error"] = c.fixed_point_error;
  j["near_miss"] = {{"n", c.search.near_miss_n},
                    {"alpha_n", c.search.near_miss_alpha},
                    {"displacement", c.search.near_miss_displacement},
                    {"score", c.search.near_miss_score}};
  j["valid"] = c.valid();
  j["contradiction"] = c.contradiction;
  return j.dump();
}

std::filesystem::path append_certificate(const std::filesystem::path& dir,
                                         const std::string& experiment_id,
                                         const TrapCertificate& certificate) {
  std::filesystem::create_directories(dir);
  const auto path = dir / (experiment_id + ".jsonl");
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  out << certificate_record(certificate) << '\n';
  return path;
}

}  // namespace denjoy::trap
