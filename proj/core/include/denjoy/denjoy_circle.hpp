#pragma once

// The classical C^1 Denjoy counterexample on the circle: the rotation by
// alpha is blown up by inserting intervals I_n of length c / (1 + n^2) at the
// orbit points {n alpha}, |n| <= N_t, and I_n is carried onto I_{n+1} by a
// bridge with unit derivative at both endpoints.
//
// Positions on the blown-up circle: a point y of the original circle that is
// not an orbit point sits at z(y) = (1 - L_t) y + a(y), with a(y) the total
// length inserted at orbit points below y and L_t the total inserted length.
// Only |n| <= N_t is inserted; the missing tail is bounded by 2c / N_t and the
// two places where the truncation shows (the image of I_{N_t} and the preimage
// of I_{-N_t}) are off by at most l_{N_t}.

#include <cstdint>
#include <memory>
#include <vector>

#include "denjoy/dynamics.hpp"

namespace denjoy::dynamics {

struct DenjoyParams {
  double alpha = 0.6180339887498949;
  double c = 0.1;
  std::int64_t truncation = 200000;
  double tail_tolerance = 1e-5;
};

class DenjoyCircle {
 public:
  // Throws BudgetExceeded if c * pi * coth(pi) >= 1, TailTooLarge if
  // 2c / N_t >= tail_tolerance.
  explicit DenjoyCircle(const DenjoyParams& params);

  struct Location {
    bool in_interval = false;
    std::int64_t index = 0;  // the interval containing z, or the last one below it
    double offset = 0.0;     // z - s_index when inside, else (1 - L_t)-scaled gap
    double y = 0.0;          // collapse(z)
  };

  const DenjoyParams& params() const noexcept { return params_; }
  std::int64_t truncation() const noexcept { return params_.truncation; }

  double interval_length(std::int64_t n) const noexcept;
  // Left endpoint s_n of I_n, |n| <= N_t.
  double interval_start(std::int64_t n) const;
  // {n alpha} for |n| <= N_t.
  double orbit_point(std::int64_t n) const;

  double inserted_length() const noexcept { return inserted_; }
  // c * pi * coth(pi): the untruncated total.
  double series_length() const noexcept;
  double tail_bound() const noexcept;

  Location locate(double z) const;

  // Lift F: R -> R with F(z + 1) = F(z) + 1.
  double lift(double z) const;
  double derivative(double z) const;

  // Semiconjugacy h to the rotation: collapses every I_n to {n alpha}.
  double collapse(double z) const;

 private:
  double bridge_target_start(std::int64_t n, bool& wraps) const;
  double position_after(double y_base, std::int64_t image_index, double delta) const;

  DenjoyParams params_;
  double inserted_ = 0.0;
  double scale_ = 1.0;  // 1 - L_t

  // Sorted by orbit point.
  std::vector<double> ys_;
  std::vector<double> starts_;
  std::vector<double> lengths_;
  std::vector<std::int64_t> indices_;
  // slot_[n + N_t] = sorted position of I_n.
  std::vector<std::size_t> slot_;
};

struct WanderingCheck {
  bool disjoint = false;
  double min_gap = 0.0;  // smallest gap between consecutive image arcs
  std::size_t images = 0;
};

// Checks that I_0, f(I_0), ..., f^n(I_0) are pairwise disjoint arcs. The arcs
// are the images of the endpoints of I_0 widened outward by 1e-12.
WanderingCheck wandering_images(const DenjoyCircle& circle, std::size_t n);

// max over `samples` equally spaced points of I_0 of |log (f^n)'|.
double max_log_derivative(const DenjoyCircle& circle, std::size_t n, std::size_t samples = 2001);

// The circle map as a ModelMap of dimension 1.
ModelMap denjoy_circle(const DenjoyParams& params);
ModelMap denjoy_circle(std::shared_ptr<const DenjoyCircle> circle);

}  // namespace denjoy::dynamics
