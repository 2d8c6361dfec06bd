#pragma once

// Displacement-ratio profiles and membership verdicts for
//   H   = { f : |f(x) - x| / |x| -> 0 },
//   H_α = { f : |f(x) - x| <= K |x|^α for |x| >= R }.
//
// Limits at infinity are replaced by trend analysis over a geometric radius
// schedule. Every verdict records the thresholds it applied.

#include "qilab/map.hpp"
#include "qilab/sampling.hpp"
#include "qilab/verdict.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qilab {

struct TrendRules {
  double noise_floor = 1e-12;     // ratios at or below this count as exact zeros
  double monotone_rel = 1e-9;     // relative slack for monotonicity tests
  double tail_fraction = 0.5;     // trailing share of annuli treated as the tail
  double divergence_factor = 1.5; // per-decade growth that counts as divergence
  double divergence_decades = 3;  // consecutive decades of such growth needed
  double k_inflation = 1.05;      // certificate K over the sampled tail sup
};

struct HAlphaCertificate {
  double alpha = 0.5;
  double K = 1.0;
  double R = 1.0;
  CertificateKind kind = CertificateKind::Sampled;
  std::string provenance;
};

using VectorField = std::function<Point(const Point&)>;

/// Profile of |field(x)| / |x - basepoint|^exponent over radii × directions,
/// with x = r·u. exponent = 0 gives absolute magnitudes.
RatioProfile field_profile(const VectorField& field, double exponent, const std::vector<double>& radii,
                           const std::vector<Point>& directions, const std::optional<Point>& basepoint = std::nullopt);

/// Profile of |f(x) - x| / |x|^exponent; exponent in (0, 1].
RatioProfile ratio_profile(const Map& map, double exponent, const SamplingPlan& plan,
                           const std::optional<Point>& basepoint = std::nullopt);

/// Index of the first tail entry.
std::size_t tail_begin(std::size_t entries, double tail_fraction);

/// Throws InvalidPlan unless the plan has >= 4 annuli over >= 3 decades.
void require_asymptotic_plan(const SamplingPlan& plan);

/// Decay decision shared by membership_H and coset tests:
///  Confirmed    tail sup non-increasing and its limit estimate below tol;
///  Refuted      tail sup non-decreasing and bounded below by some δ > tol;
///  Inconclusive otherwise.
/// The limit estimate is min(last tail sup, intercept of a least-squares line
/// of sup against 1/ln r), clamped at zero.
Verdict decide_decay(RatioProfile profile, double tol, const TrendRules& rules);

Verdict membership_H(const Map& map, const SamplingPlan& plan, double tol, const TrendRules& rules = {},
                     const std::optional<Point>& basepoint = std::nullopt);

struct HAlphaResult {
  Verdict verdict;
  std::optional<HAlphaCertificate> certificate;
};

HAlphaResult membership_H_alpha(const Map& map, double alpha, const SamplingPlan& plan, const TrendRules& rules = {});

struct TailExtremes {
  double limsup = 0.0;
  double liminf = 0.0;
};

/// Max of sup_ratio and min of inf_ratio over the trailing tail_fraction.
TailExtremes limsup_liminf(const RatioProfile& profile, double tail_fraction);

/// Checks |f(x) - x| <= K|x|^α at every sampled x with |x| >= R.
Verdict check_halpha_certificate(const Map& map, const HAlphaCertificate& cert, const SamplingPlan& plan);

}  // namespace qilab
