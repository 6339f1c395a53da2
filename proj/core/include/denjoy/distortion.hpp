#pragma once

// Cocycle distortion along orbits: per-step distances d_i to the round
// structure, their running sums T_n, and the distance D_n of the ordered
// product. The left-invariance of the metric gives D_n <= T_n; disjointness
// of the visited balls turns per-step bounds d_i <= M vol(B_i) into a uniform
// bound sup_n D_n <= M sum vol.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "denjoy/blowup.hpp"
#include "denjoy/linalg.hpp"
#include "denjoy/torus.hpp"

namespace denjoy::distortion {

inline constexpr double kTelescopeTolerance = 1e-8;

struct DistortionTrace {
  TorusPoint start;
  std::vector<double> step_distance;       // d_i, i = 0..n-1
  std::vector<double> telescoped;          // T_{i+1} = d_0 + ... + d_i
  std::vector<double> direct;              // D_{i+1} = dist_to_base(A_i ... A_0)
  std::vector<std::optional<int>> ball;    // ball visited at step i
  std::vector<double> volume;              // vol of that ball, 0 on Gamma

  std::size_t length() const noexcept { return step_distance.size(); }
};

// Distortion of an arbitrary matrix cocycle A_0, ..., A_{n-1}.
DistortionTrace trace_matrix_cocycle(std::span<const Matrix> steps);

// Follows x under the similarity dynamics of the field's ball system for n
// steps, with step Jacobians taken from the field. Off the balls the point is
// translated by theta and the step is the identity.
// Throws WindowEdge if the orbit would leave the index window.
DistortionTrace trace_cocycle_distortion(const blowup::SyntheticField& field, const TorusPoint& x,
                                         std::size_t n);

struct FlatnessFit {
  double constant = 0.0;   // sup dist / l^k
  double slope = 0.0;      // least-squares slope of log dist against log l
  double intercept = 0.0;
  std::size_t samples = 0;
  std::size_t regressed = 0;  // samples with dist > 0 entering the regression
  std::vector<double> ell;
  std::vector<double> dist;
};

// Fits dist <= C l^k from paired samples; k is the torus dimension.
// Throws DegenerateSamples if every l < 1e-9.
FlatnessFit fit_flatness(std::span<const double> ell, std::span<const double> dist, int k);

// Samples ball j with l / r stratified log-uniformly over [1e-3, 1].
// Requires at least 100 samples.
FlatnessFit fit_per_ball_constant(const blowup::SyntheticField& field, int j, std::size_t samples,
                                  std::uint64_t seed);

struct VolumeBoundReport {
  bool pass = false;
  double sup_direct = 0.0;
  double volume_sum = 0.0;  // over distinct visited balls
  double bound = 0.0;       // M * volume_sum
  double margin = 0.0;      // bound - sup_direct
  double best_constant = 0.0;  // smallest M with d_i <= M vol_i for every step
  bool per_step_certified = false;
  std::optional<std::size_t> first_violation;  // PerStepViolation
  std::optional<int> revisited_ball;           // wandering violation
};

VolumeBoundReport verify_volume_bound(const DistortionTrace& trace, double constant);

// Sum of ball volumes; throws NotDisjoint without a certificate.
double volume_sum(const blowup::BallSystem& system);

// Columns: step,d_i,T_n,D_n,ball_index,vol
void write_trace_table(std::ostream& out, const DistortionTrace& trace);

}  // namespace denjoy::distortion
