#pragma once

// Wandering Euclidean balls along a translation orbit of the k-torus.
//
// Ball j (|j| <= J) is centred at c_j = frac(seed + j theta) with radius r_j.
// Balls are pairwise disjoint in the flat metric; the complement Gamma of
// their interiors is where the model derivative is conformal.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "denjoy/dynamics.hpp"
#include "denjoy/linalg.hpp"
#include "denjoy/torus.hpp"

namespace denjoy::blowup {

inline constexpr double kRelativeClearance = 1e-6;
inline constexpr double kMinRadius = 1e-12;
inline constexpr double kCoincidenceTolerance = 1e-12;
inline constexpr int kRecordVersion = 1;

// r_j = c_r / (1 + |j|)^p.
struct Schedule {
  double c_r = 0.05;
  double p = 0.8;

  double radius(int j) const;
  // True when sum_j r_j^k converges, i.e. p k > 1.
  bool summable(int k) const { return p * k > 1.0; }
};

struct RepairEntry {
  std::string kind;  // "clearance" or "budget"
  int index = 0;     // ball whose radius changed (0 for a budget rescale)
  int against = 0;   // ball it collided with (0 for a budget rescale)
  double old_radius = 0.0;
  double new_radius = 0.0;
  double factor = 1.0;

  friend bool operator==(const RepairEntry&, const RepairEntry&) = default;
};

// Lebesgue volume of a Euclidean k-ball.
double ball_volume(int k, double r);

struct DisjointnessCertificate {
  bool holds = false;
  double worst_slack = 0.0;  // min over pairs of d - (r_i + r_j) - 1e-6 min(r_i, r_j)
  int worst_i = 0;
  int worst_j = 0;
};

class BallSystem {
 public:
  // Assembles a system from explicit data and re-certifies it: centers must
  // follow the theta orbit and balls must be disjoint and within budget.
  // Throws NotDisjoint, BudgetExceeded, InvalidArgument.
  static BallSystem from_parts(const TranslationVector& theta, const Vector& seed, int window,
                               const std::vector<Vector>& centers, const std::vector<double>& radii,
                               double budget, std::vector<RepairEntry> repair_log);

  int dimension() const noexcept { return static_cast<int>(seed_.size()); }
  const TranslationVector& theta() const noexcept { return theta_; }
  const Vector& seed() const noexcept { return seed_; }
  int window() const noexcept { return window_; }
  int size() const noexcept { return 2 * window_ + 1; }
  bool contains_index(int j) const noexcept { return j >= -window_ && j <= window_; }

  Vector center(int j) const;
  // seed + j theta, unreduced.
  Vector lift_center(int j) const;
  double radius(int j) const;
  double volume(int j) const;
  double budget() const noexcept { return budget_; }
  const std::vector<RepairEntry>& repair_log() const noexcept { return repair_log_; }
  const DisjointnessCertificate& certificate() const noexcept { return certificate_; }

  // Index of the closed ball containing x, if any.
  std::optional<int> locate(const TorusPoint& x) const;

 private:
  friend BallSystem build_ball_system(const TranslationVector&, int, const Schedule&, double,
                                      const Vector&);

  BallSystem() = default;
  std::size_t slot(int j) const;
  void certify();

  TranslationVector theta_;
  Vector seed_;
  int window_ = 0;
  Matrix centers_;  // k x (2J+1)
  std::vector<double> radii_;
  double budget_ = 0.0;
  std::vector<RepairEntry> repair_log_;
  DisjointnessCertificate certificate_;
};

// Greedy construction: balls are placed in the order 0, -1, 1, -2, 2, ...; when
// a new ball collides with a placed one, the member of the pair that can keep
// the larger fraction of its radius is shrunk until the relative clearance
// 1e-6 holds. If the total volume then exceeds v_max, all radii are rescaled
// uniformly.
// Throws InfeasibleWindow, RationalOrbit, InvalidArgument.
BallSystem build_ball_system(const TranslationVector& theta, int window, const Schedule& schedule,
                             double v_max, const Vector& seed);
BallSystem build_ball_system(const TranslationVector& theta, int window, const Schedule& schedule,
                             double v_max);

// Fully-independent pairwise check of the clearance condition.
DisjointnessCertificate check_disjoint(const BallSystem& system);

double total_volume(const BallSystem& system);

// sqrt(r^2 - |x - c|^2): half the shortest chord of B(c, r) through x.
// Throws OutsideBall.
double chord_half_length(const Vector& x, const Vector& center, double radius);

// x -> c_{j+1} + (r_{j+1}/r_j)(x - c_j) on each ball. Undefined off the balls.
class SimilarityMap {
 public:
  explicit SimilarityMap(std::shared_ptr<const BallSystem> system);

  const BallSystem& system() const noexcept { return *system_; }
  double ratio(int j) const;

  // Throws NotInSystem off the balls, WindowEdge on the last ball.
  TorusPoint eval(const TorusPoint& x) const;
  TorusPoint eval(int j, const TorusPoint& x) const;
  // Lift: c~_{j+1} + ratio (x~ - c~_j) for x~ near c~_j.
  Vector eval_lift(int j, const Vector& x) const;
  Matrix jacobian(const TorusPoint& x) const;

 private:
  int require_ball(const TorusPoint& x) const;

  std::shared_ptr<const BallSystem> system_;
};

// Affine similarity x -> target + scale (x - source) of R^k.
struct AffineSimilarity {
  double scale = 1.0;
  Vector source;
  Vector target;

  Vector operator()(const Vector& x) const { return target + scale * (x - source); }
  // Solves (1 - scale) p = target - scale source; requires scale != 1.
  Vector fixed_point() const;
};

// The n-step lifted chain B_j -> B_{j+n}, extended affinely to R^k. The lift of
// c_{j+n} is the representative closest to c~_j.
AffineSimilarity composed_chain(const BallSystem& system, int j, int n);

// Collapse onto the base translation: every point of B_j goes to c_j, other
// points are fixed.
TorusPoint collapse(const BallSystem& system, const TorusPoint& x);

struct DistortionProfile {
  int order = 2;                   // flatness order m
  std::vector<double> amplitudes;  // eps_j, indexed j + J
  Matrix direction;                // traceless symmetric, unit Frobenius norm

  double amplitude(int j, int window) const;
  // Throws InvalidArgument when the direction or sizes are inconsistent.
  void validate(int k, int window) const;
};

// diag(1, -1, 0, ...) / sqrt(2).
Matrix diagonal_direction(int k);
// (E_01 + E_10) / sqrt(2).
Matrix shear_direction(int k);

DistortionProfile constant_profile(const BallSystem& system, int order, double eps,
                                   const Matrix& direction);
// eps_j = eps0 vol(B_j) / 2, so that the per-step distance never exceeds eps0 vol(B_j).
DistortionProfile volume_profile(const BallSystem& system, int order, double eps0,
                                 const Matrix& direction);

// A(x) = (r_{j+1}/r_j) exp(eps_j (l(x)/r_j)^m N) on B_j, Identity on Gamma.
// dist_to_base(A(x)) = 2 |eps_j| (l(x)/r_j)^m.
class SyntheticField {
 public:
  SyntheticField(std::shared_ptr<const BallSystem> system, DistortionProfile profile);

  const BallSystem& system() const noexcept { return *system_; }
  const DistortionProfile& profile() const noexcept { return profile_; }

  Matrix operator()(const TorusPoint& x) const;
  // Evaluation when the containing ball is already known. Throws WindowEdge.
  Matrix at(int j, const TorusPoint& x) const;
  // Closed-form distance to sigma_0 of at(j, x).
  double closed_form_distance(int j, const TorusPoint& x) const;

 private:
  std::shared_ptr<const BallSystem> system_;
  DistortionProfile profile_;
  Matrix eigvecs_;
  Vector eigvals_;
};

// Line-delimited JSON record; round-trips bit-exactly.
void write_ball_system(std::ostream& out, const BallSystem& system);
BallSystem read_ball_system(std::istream& in);

}  // namespace denjoy::blowup
