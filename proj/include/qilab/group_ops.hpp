#pragma once

// Group-level operations on QI(R^n)/H: coset tests, commutation defects,
// torsion orders, certificate algebra for H_α, and the ball gadget used to
// exhibit non-commuting partners.

#include "qilab/asymptotics.hpp"
#include "qilab/map.hpp"
#include "qilab/qi_certifier.hpp"
#include "qilab/sampling.hpp"
#include "qilab/verdict.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qilab {

/// Profile of |f(x) - g(x)| / |x| judged with the same decay rule as
/// membership_H. Confirmed means H[f] = H[g].
Verdict coset_equal_mod_H(const Map& f, const Map& g, const SamplingPlan& plan, double tol,
                          const TrendRules& rules = {});

struct CommutationProfiles {
  RatioProfile absolute;  // |fg(x) - gf(x)|
  RatioProfile relative;  // |fg(x) - gf(x)| / |x|
};

CommutationProfiles commutation_defect(const Map& f, const Map& g, const SamplingPlan& plan);

struct TorsionResult {
  std::optional<int> order;
  std::vector<Verdict> powers;  // powers[m-1] judges map^m against the identity
  std::string reason;
};

TorsionResult torsion_order_mod_H(const Map& map, int k_max, const SamplingPlan& plan, double tol,
                                  const TrendRules& rules = {});

/// The certificate algebra reads |g(x)| off the QI bounds of g relative to the
/// origin, so the additive constant must absorb |g(0)|. Returns cert with
/// C increased by |map(0)|.
QICertificate anchor_at_origin(const QICertificate& cert, const Map& map);

/// Certificate for f∘g from certificates of f and g and the QI constants
/// (K', C') of g (anchored at the origin). Splits
///   |fg(x) - x| <= |f(g(x)) - g(x)| + |g(x) - x|
/// and bounds |g(x)|^α <= (K'^α + (C'/R)^α) |x|^α, giving
///   K = (K'^α + (C'/R)^α) K_f + K_g,   R = max(R_g, K'(R_f + C'), 1).
/// Throws AlphaMismatch when the exponents differ.
HAlphaCertificate composition_certificate(const HAlphaCertificate& cert_f, const HAlphaCertificate& cert_g,
                                          const QICertificate& qi_g);

/// The max-rule K = max(K'^α K_f, K_g), R = max(R_f, R_g). Kept for
/// comparison only; it drops the cross term and is not sound in general.
HAlphaCertificate composition_certificate_max_rule(const HAlphaCertificate& cert_f, const HAlphaCertificate& cert_g,
                                                   const QICertificate& qi_g);

/// Certificate for f∘g∘f⁻¹:
///   K' = λ K_g a^α + λ K_g b^α + C + μ,  R' = max(1, a(R_g + b)),
/// with (λ, C) from qi_f, (a, b) from qi_finv (anchored at the origin) and μ
/// bounding |f(f⁻¹(x)) - x|.
HAlphaCertificate conjugation_certificate(const QICertificate& qi_f, const QICertificate& qi_finv,
                                          const HAlphaCertificate& cert_g, double equiv_slack);

struct WitnessSequence {
  std::vector<Point> points;
  std::string description;
};

struct WitnessResult {
  WitnessSequence sequence;
  double epsilon = 0.0;  // min |f(a) - a| / |a| over the sequence
  Verdict membership;    // the refuting H verdict the points were read from
};

/// Reads argmax points off f's H-profile and keeps those along which |a|,
/// |f(a)| and |f(a) - a| strictly increase with |a_{m+1}| > |f(a_m)|.
/// Throws NotOutsideH unless membership_H(f, plan, eps_floor) is Refuted and
/// InsufficientAnnuli when fewer than 3 points survive or the last one is
/// below r_max / 10.
WitnessResult build_witness_sequence(const Map& f, const SamplingPlan& plan, double eps_floor,
                                     const TrendRules& rules = {});

struct CenterRule {};
struct CentralizerRule {
  double alpha = 0.5;
  double K = 1.0;  // QI constant of f
};
using RadiusRule = std::variant<CenterRule, CentralizerRule>;

struct GadgetResult {
  Map gadget;
  GadgetData data;
  std::vector<Point> witnesses;  // sequence points a_k whose images centre the balls
  double epsilon = 0.0;          // ε the radii were computed with
  int halvings = 0;              // times ε was halved before enough balls fitted
};

/// Greedy scan over the sequence: a point is kept when its ball
/// B(f(a), r(a)) has a radius larger than the last kept one, is disjoint from
/// every kept ball, and contains no sequence point or image other than its
/// centre. When fewer than two balls fit under CenterRule, ε is halved (up to
/// 16 times). Throws WitnessTooSparse when that never succeeds.
GadgetResult build_ball_gadget(const Map& f, const WitnessSequence& seq, double epsilon, const RadiusRule& rule);

/// Ball radius for a sequence point under the given rule.
double gadget_radius(const Map& f, const Point& a, double epsilon, const RadiusRule& rule);

struct GadgetIdentities {
  std::vector<double> step1;  // |g(f(a_k)) - f(a_k)|
  std::vector<double> step2;  // |f(g(a_k)) - g(f(a_k))|
  std::vector<double> ratios; // step2 / |a_k|
  double min_ratio = 0.0;
  double max_relative_error = 0.0;  // against r_k / 4
};

/// Evaluates both gadget identities at the witness points. Confirmed when
/// each displacement equals drift_fraction·r_k within 1e-9 relative and the
/// minimum ratio is at least ε·drift_fraction/2 - 1e-9.
Verdict check_gadget_identities(const Map& f, const GadgetResult& gadget, GadgetIdentities* out = nullptr);

/// Per-ball α-profile of a gadget: entry k holds the largest sampled
/// |g(x) - x| / |x|^α over ball k, at radius |c_k|. Sample points run from
/// the centre towards the origin plus axis offsets at fractions of r_k.
RatioProfile gadget_alpha_profile(const GadgetData& data, double alpha);

/// Confirmed when the per-ball profile is non-increasing and its last entry
/// is below tol; Refuted when it is non-decreasing with every entry at or
/// above tol.
Verdict check_gadget_decay(RatioProfile profile, double tol, const TrendRules& rules = {});

}  // namespace qilab
