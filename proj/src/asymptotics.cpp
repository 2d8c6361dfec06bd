#include "qilab/asymptotics.hpp"

#include "qilab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qilab {

namespace {

void check_dimension(const Map& map, const SamplingPlan& plan) {
  plan.validate();
  if (plan.dimension != map.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "plan dimension differs from map dimension");
  }
}

std::vector<double> tail_sups(const RatioProfile& profile, std::size_t begin, double noise_floor) {
  std::vector<double> s;
  for (std::size_t i = begin; i < profile.entries.size(); ++i) {
    const double v = profile.entries[i].sup_ratio;
    s.push_back(v <= noise_floor ? 0.0 : v);
  }
  return s;
}

bool non_increasing(const std::vector<double>& s, double rel) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] > s[i - 1] * (1.0 + rel)) return false;
  }
  return true;
}

bool non_decreasing(const std::vector<double>& s, double rel) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < s[i - 1] * (1.0 - rel)) return false;
  }
  return true;
}

// Intercept at r = ∞ of the least-squares line s ≈ a + b / ln r.
std::optional<double> log_intercept(const std::vector<double>& radii, const std::vector<double>& s) {
  if (s.size() < 2) return std::nullopt;
  double mu = 0.0, ms = 0.0;
  std::vector<double> u;
  for (double r : radii) {
    if (!(r > 1.0)) return std::nullopt;
    u.push_back(1.0 / std::log(r));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    mu += u[i];
    ms += s[i];
  }
  mu /= static_cast<double>(s.size());
  ms /= static_cast<double>(s.size());
  double suu = 0.0, sus = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    sus += (u[i] - mu) * (s[i] - ms);
  }
  if (suu == 0.0) return std::nullopt;
  return ms - (sus / suu) * mu;
}

void add_tail_witnesses(Verdict& v, const RatioProfile& profile, std::size_t begin) {
  for (std::size_t i = begin; i < profile.entries.size(); ++i) {
    const auto& e = profile.entries[i];
    v.witnesses.push_back({"tail_argmax", e.radius * e.argmax_direction, std::nullopt, e.sup_ratio});
  }
}

}  // namespace

RatioProfile field_profile(const VectorField& field, double exponent, const std::vector<double>& radii,
                           const std::vector<Point>& directions, const std::optional<Point>& basepoint) {
  RatioProfile profile;
  profile.exponent = exponent;
  for (double r : radii) {
    ProfileEntry entry;
    entry.radius = r;
    entry.sup_ratio = -1.0;
    entry.inf_ratio = std::numeric_limits<double>::infinity();
    for (const auto& u : directions) {
      const Point x = r * u;
      const double base = basepoint ? (x - *basepoint).norm() : x.norm();
      const double denom = exponent == 0.0 ? 1.0 : std::pow(base, exponent);
      const double ratio = field(x).norm() / denom;
      if (ratio > entry.sup_ratio) {
        entry.sup_ratio = ratio;
        entry.argmax_direction = u;
      }
      entry.inf_ratio = std::min(entry.inf_ratio, ratio);
    }
    profile.entries.push_back(std::move(entry));
  }
  return profile;
}

RatioProfile ratio_profile(const Map& map, double exponent, const SamplingPlan& plan,
                           const std::optional<Point>& basepoint) {
  check_dimension(map, plan);
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "profile exponent must lie in (0, 1]");
  }
  const auto dirs = probe_directions(plan, {&map});
  return field_profile([&](const Point& x) -> Point { return evaluate(map, x) - x; }, exponent, plan.radii, dirs,
                       basepoint);
}

std::size_t tail_begin(std::size_t entries, double tail_fraction) {
  const auto len = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(entries)));
  return entries - std::clamp<std::size_t>(len, 1, entries);
}

void require_asymptotic_plan(const SamplingPlan& plan) {
  plan.validate();
  if (plan.radii.size() < 4 || plan.r_max() < 1000.0 * plan.r_min()) {
    throw Error(ErrorCode::InvalidPlan, "asymptotic tests need >= 4 annuli spanning >= 3 decades");
  }
}

Verdict decide_decay(RatioProfile profile, double tol, const TrendRules& rules) {
  if (profile.entries.empty()) throw Error(ErrorCode::EmptyProfile, "no profile entries");
  const std::size_t begin = tail_begin(profile.entries.size(), rules.tail_fraction);
  const auto s = tail_sups(profile, begin, rules.noise_floor);
  std::vector<double> radii;
  for (std::size_t i = begin; i < profile.entries.size(); ++i) radii.push_back(profile.entries[i].radius);

  Verdict v;
  v.thresholds = {{"tol", tol},
                  {"noise_floor", rules.noise_floor},
                  {"monotone_rel", rules.monotone_rel},
                  {"tail_fraction", rules.tail_fraction}};
  const double last = s.back();
  const auto intercept = log_intercept(radii, s);
  const double limit = std::max(0.0, intercept ? std::min(last, *intercept) : last);
  const double floor = *std::min_element(s.begin(), s.end());
  v.metrics = {{"tail_last_sup", last}, {"tail_min_sup", floor}, {"limit_estimate", limit}};
  if (intercept) v.metrics["log_intercept"] = *intercept;
  v.series["tail_sup"] = s;

  const bool decreasing = non_increasing(s, rules.monotone_rel);
  const bool increasing = non_decreasing(s, rules.monotone_rel);
  if (decreasing && limit < tol) {
    v.status = Status::Confirmed;
    v.reason = "tail sup ratio is non-increasing with limit estimate below tol";
  } else if (increasing && floor > tol) {
    v.status = Status::Refuted;
    v.reason = "tail sup ratio is non-decreasing and bounded away from zero";
    add_tail_witnesses(v, profile, begin);
  } else {
    v.status = Status::Inconclusive;
    v.reason = "tail trend neither decays below tol nor stays bounded away from it";
  }
  v.profile = std::move(profile);
  return v;
}

Verdict membership_H(const Map& map, const SamplingPlan& plan, double tol, const TrendRules& rules,
                     const std::optional<Point>& basepoint) {
  check_dimension(map, plan);
  require_asymptotic_plan(plan);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  return decide_decay(ratio_profile(map, 1.0, plan, basepoint), tol, rules);
}

HAlphaResult membership_H_alpha(const Map& map, double alpha, const SamplingPlan& plan, const TrendRules& rules) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1)");
  check_dimension(map, plan);
  require_asymptotic_plan(plan);
  RatioProfile profile = ratio_profile(map, alpha, plan);
  const std::size_t begin = tail_begin(profile.entries.size(), rules.tail_fraction);
  const auto s = tail_sups(profile, begin, rules.noise_floor);

  HAlphaResult result;
  Verdict& v = result.verdict;
  v.thresholds = {{"alpha", alpha},
                  {"noise_floor", rules.noise_floor},
                  {"monotone_rel", rules.monotone_rel},
                  {"tail_fraction", rules.tail_fraction},
                  {"divergence_factor", rules.divergence_factor},
                  {"divergence_decades", rules.divergence_decades},
                  {"k_inflation", rules.k_inflation}};

  // Growth per decade between consecutive tail annuli, and the longest run
  // (measured in decades) where it reaches the divergence factor.
  std::vector<double> growth;
  double run = 0.0;
  double best_run = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double decades = std::log10(profile.entries[begin + i].radius / profile.entries[begin + i - 1].radius);
    double g;
    if (s[i - 1] == 0.0) {
      g = s[i] == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      g = std::pow(s[i] / s[i - 1], 1.0 / decades);
    }
    growth.push_back(g);
    run = g >= rules.divergence_factor ? run + decades : 0.0;
    best_run = std::max(best_run, run);
  }
  v.series["tail_sup"] = s;
  v.series["growth_per_decade"] = growth;
  const double smax = *std::max_element(s.begin(), s.end());
  v.metrics = {{"tail_max_sup", smax}, {"divergent_decades", best_run}};

  if (best_run >= rules.divergence_decades - 1e-9) {
    v.status = Status::Refuted;
    v.reason = "alpha-profile grows by at least the divergence factor per decade across the tail";
    add_tail_witnesses(v, profile, begin);
  } else if (non_increasing(s, rules.monotone_rel)) {
    v.status = Status::Confirmed;
    v.reason = "alpha-profile is bounded (non-increasing) on the tail";
    HAlphaCertificate cert;
    cert.alpha = alpha;
    cert.K = smax > 0.0 ? rules.k_inflation * smax : rules.noise_floor;
    cert.R = profile.entries[begin].radius;
    cert.kind = CertificateKind::Sampled;
    cert.provenance = "membership_H_alpha: K = " + std::to_string(rules.k_inflation) +
                      " x max sampled tail sup, R = first tail radius";
    result.certificate = cert;
  } else {
    v.status = Status::Inconclusive;
    v.reason = "alpha-profile neither bounded nor diverging fast enough on the tail";
  }
  v.profile = std::move(profile);
  return result;
}

TailExtremes limsup_liminf(const RatioProfile& profile, double tail_fraction) {
  if (profile.entries.empty()) throw Error(ErrorCode::EmptyProfile, "no profile entries");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "tail_fraction must lie in (0, 1]");
  }
  TailExtremes t{0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = tail_begin(profile.entries.size(), tail_fraction); i < profile.entries.size(); ++i) {
    t.limsup = std::max(t.limsup, profile.entries[i].sup_ratio);
    t.liminf = std::min(t.liminf, profile.entries[i].inf_ratio);
  }
  return t;
}

Verdict check_halpha_certificate(const Map& map, const HAlphaCertificate& cert, const SamplingPlan& plan) {
  check_dimension(map, plan);
  std::vector<double> radii{cert.R};
  for (double r : plan.radii) {
    if (r > cert.R) radii.push_back(r);
  }
  const auto dirs = probe_directions(plan, {&map});
  Verdict v;
  v.thresholds = {{"alpha", cert.alpha}, {"K", cert.K}, {"R", cert.R}};
  double worst = 0.0;
  std::optional<Witness> witness;
  for (double r : radii) {
    for (const auto& u : dirs) {
      const Point x = r * u;
      const double bound = cert.K * std::pow(x.norm(), cert.alpha);
      const double d = displacement(map, x);
      const double ratio = d / bound;
      if (ratio > worst) worst = ratio;
      if (d > bound * (1.0 + 1e-12) && (!witness || ratio > witness->value)) {
        witness = Witness{"exceeds_bound", x, std::nullopt, ratio};
      }
    }
  }
  v.metrics["max_displacement_over_bound"] = worst;
  if (witness) {
    v.status = Status::Refuted;
    v.reason = "sampled displacement exceeds K|x|^alpha beyond R";
    v.witnesses.push_back(*witness);
  } else {
    v.status = Status::Confirmed;
    v.reason = "every sampled point beyond R satisfies the certificate";
  }
  return v;
}

}  // namespace qilab
