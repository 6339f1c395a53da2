#pragma once

// Trapping an enlarged wandering ball inside itself.
//
// For a wandering ball B(x_0, a_0) with images B(x_n, a_n), a return time n
// with a_n < (lambda - 1) a_0 / (2 lambda') and |x_n - x_0| < a_0 + (lambda - 1) a_0 / 2
// forces f^n(B(x_0, lambda a_0)) inside B(x_0, lambda a_0), hence a fixed
// point of f^n. A minimal translation has no periodic points, so such a trap
// is incompatible with the semiconjugacy.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "denjoy/blowup.hpp"
#include "denjoy/distortion.hpp"
#include "denjoy/linalg.hpp"

namespace denjoy::trap {

using LiftMap = std::function<Vector(const Vector&)>;

inline constexpr double kLambdaPrimeSafety = 1.05;
inline constexpr double kFixedPointTolerance = 1e-10;
inline constexpr double kReturnTolerance = 1e-9;

struct TrapParams {
  double lambda = 2.0;
  double lambda_prime = 2.1;
  int horizon = 2000;
  std::size_t boundary_samples = 10000;
  double inclusion_margin = 0.0;
  std::uint64_t seed = 1;

  // Throws InvalidArgument unless lambda > 1, lambda' > 1, horizon >= 1.
  void validate() const;
};

struct LambdaPrimeEstimate {
  double raw = 0.0;       // sup |g(x) - y_0| / beta over the samples
  double inflated = 0.0;  // raw * 1.05
  std::size_t samples = 0;
};

// Empirical constant for g(B(x_0, lambda alpha)) inside B(y_0, lambda' beta),
// sampled on the boundary sphere and a random interior cloud.
LambdaPrimeEstimate estimate_lambda_prime(const LiftMap& g, const Vector& x0, double alpha,
                                          const Vector& y0, double beta, double lambda,
                                          std::size_t samples, std::uint64_t seed);

struct Thresholds {
  double radius = 0.0;        // (lambda - 1) alpha_0 / (2 lambda')
  double displacement = 0.0;  // alpha_0 + (lambda - 1) alpha_0 / 2
};

Thresholds schwartz_thresholds(double lambda, double lambda_prime, double alpha0);

struct TrapSearch {
  bool found = false;
  int n = 0;
  double alpha0 = 0.0;
  double alpha_n = 0.0;
  double displacement = 0.0;
  Thresholds thresholds;
  // Closest candidate by max(alpha_n / radius, displacement / displacement
  // threshold); equals the trap when found.
  int near_miss_n = 0;
  double near_miss_alpha = 0.0;
  double near_miss_displacement = 0.0;
  double near_miss_score = 0.0;
};

// Smallest n in [1, horizon] meeting both strict inequalities for ball 0.
TrapSearch find_trap_time(const blowup::BallSystem& system, const TrapParams& params);

struct InclusionCheck {
  bool verified = false;
  double worst_margin = 0.0;  // min over samples of radius - |g(p) - center|
  std::size_t samples = 0;
};

// Throws UndefinedAtSample if g fails or returns a non-finite point.
InclusionCheck verify_inclusion(const LiftMap& g, const Vector& center, double radius,
                                const TrapParams& params);

struct FixedPointResult {
  Vector point;
  double residual = 0.0;  // |g(p) - p|, re-evaluated at the returned point
  bool converged = false;  // false is the NoConvergence outcome
  bool damped = false;
  std::size_t iterations = 0;
};

// Picard iteration from the centre; after 1e4 steps without reaching 1e-10
// falls back to x <- (1 - s) x + s g(x), halving s whenever the residual
// fails to decrease.
FixedPointResult locate_fixed_point(const LiftMap& g, const Vector& center, double radius);

struct TrapCertificate {
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double lambda_prime_raw = 0.0;
  double lambda_prime = 0.0;
  int n = 0;
  double alpha0 = 0.0;
  double alpha_n = 0.0;
  double threshold_radius = 0.0;
  double displacement = 0.0;
  double threshold_displacement = 0.0;
  double chain_margin = 0.0;  // lambda a_0 - (|x_n - x_0| + lambda' a_n)
  bool inclusion_verified = false;
  double inclusion_worst_margin = 0.0;
  std::size_t inclusion_samples = 0;
  Vector fixed_point;
  double fixed_point_residual = 0.0;
  bool fixed_point_converged = false;
  Vector closed_form_fixed_point;
  double fixed_point_error = 0.0;
  bool contradiction = false;
  TrapSearch search;

  bool valid() const noexcept {
    return search.found && alpha_n < threshold_radius && displacement < threshold_displacement &&
           inclusion_verified;
  }
};

// Full trap pipeline on ball 0: lambda' from the one-step similarity, trap
// search, inclusion on the composed chain, fixed-point location.
TrapCertificate certify_trap(const blowup::BallSystem& system, TrapParams params);

struct ContradictionReport {
  // (i) minimality evidence
  bool minimality_evidence = false;
  int minimality_horizon = 0;
  double closest_return = 0.0;
  int closest_return_time = 0;
  // (ii) periodic point from trap + Brouwer
  bool periodic_point = false;
  int period = 0;
  bool located = false;
  Vector point;
  double residual = 0.0;
  // (iii) joint contradiction
  bool wandering_balls = false;
  std::optional<bool> bounded_distortion;
  bool contradiction = false;
  std::vector<std::string> clauses;
};

// Throws IncompleteEvidence when the certificate is not valid.
ContradictionReport contradiction_report(const blowup::BallSystem& system, const TrapParams& params,
                                         const TrapCertificate& certificate, int minimality_horizon,
                                         const std::optional<distortion::VolumeBoundReport>& volume_bound = std::nullopt);

// Single-line JSON record of a certificate.
std::string certificate_record(const TrapCertificate& certificate);

// Appends the record to <dir>/<experiment_id>.jsonl and returns that path.
std::filesystem::path append_certificate(const std::filesystem::path& dir,
                                         const std::string& experiment_id,
                                         const TrapCertificate& certificate);

}  // namespace denjoy::trap
