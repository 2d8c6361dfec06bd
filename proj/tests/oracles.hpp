#pragma once

// Closed-form reference values. Nothing here calls into the library: every
// quantity is derived by hand from the map formulas and evaluated with plain
// <cmath>, so tests compare the sampled machinery against independent numbers.

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

/// |R_θ u - u| for a unit vector u in the rotation plane, θ = 2π/k.
inline double chord(int k) { return 2.0 * std::sin(std::numbers::pi / k); }

/// |x / ln(2 + |x|)| / |x|.
inline double linear_over_log_ratio(double r) { return 1.0 / std::log(2.0 + r); }

/// |A ln(1 + r) v| / r^α for a unit v.
inline double log_drift_ratio(double A, double r, double alpha) {
  return std::abs(A) * std::log1p(r) / std::pow(r, alpha);
}

/// Stationary point of ln(1 + r) / r^α: α (1 + r) ln(1 + r) = r. Bisection on
/// a bracket where the sign change is guaranteed.
inline double log_drift_peak(double alpha) {
  auto h = [&](double r) { return alpha * (1.0 + r) * std::log1p(r) - r; };
  double lo = 1e-9, hi = 1.0;
  while (h(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// sup_{r >= R} ln(1 + r) / r^α.
inline double log_drift_sup_beyond(double R, double alpha) {
  const double peak = log_drift_peak(alpha);
  return log_drift_ratio(1.0, std::max(R, peak), alpha);
}

/// Smallest r with 1 / ln(2 + r) <= t.
inline double linear_over_log_threshold(double t) { return std::exp(1.0 / t) - 2.0; }

/// Smallest r >= e - 1 with ln(1 + r) / r <= t (the ratio decreases there).
inline double log_drift_threshold(double t) {
  double lo = std::numbers::e - 1.0, hi = lo;
  while (std::log1p(hi) / hi > t) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::log1p(mid) / mid > t ? lo : hi) = mid;
  }
  return hi;
}

/// Smallest entry of a sorted radius list that is >= lower and >= threshold.
inline double first_radius_at_least(const std::vector<double>& radii, double lower, double threshold) {
  for (double r : radii) {
    if (r >= lower && r >= threshold) return r;
  }
  return std::nan("");
}

/// |(b - R_θ b)| where R_θ rotates the (0, 1) coordinate plane.
inline double rotation_offset_defect(double b0, double b1, double theta) {
  const double rb0 = std::cos(theta) * b0 - std::sin(theta) * b1;
  const double rb1 = std::sin(theta) * b0 + std::cos(theta) * b1;
  return std::hypot(b0 - rb0, b1 - rb1);
}

/// The max-rule composition constant, by direct arithmetic.
inline double max_rule_K(double K_f, double K_g, double K_prime, double alpha) {
  return std::max(std::pow(K_prime, alpha) * K_f, K_g);
}

}  // namespace oracle
