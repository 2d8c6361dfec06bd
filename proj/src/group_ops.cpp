#include "qilab/group_ops.hpp"

#include "qilab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qilab {

namespace {

void require_same_dimension(const Map& f, const Map& g, const SamplingPlan& plan) {
  if (f.dimension() != g.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "maps have different dimensions");
  }
  plan.validate();
  if (plan.dimension != f.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "plan dimension differs from map dimension");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Verdict coset_equal_mod_H(const Map& f, const Map& g, const SamplingPlan& plan, double tol,
                          const TrendRules& rules) {
  require_same_dimension(f, g, plan);
  require_asymptotic_plan(plan);
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  const auto dirs = probe_directions(plan, {&f, &g});
  auto profile = field_profile([&](const Point& x) -> Point { return evaluate(f, x) - evaluate(g, x); }, 1.0,
                               plan.radii, dirs);
  return decide_decay(std::move(profile), tol, rules);
}

CommutationProfiles commutation_defect(const Map& f, const Map& g, const SamplingPlan& plan) {
  require_same_dimension(f, g, plan);
  const auto dirs = probe_directions(plan, {&f, &g});
  const VectorField defect = [&](const Point& x) -> Point {
    return evaluate(f, evaluate(g, x)) - evaluate(g, evaluate(f, x));
  };
  return {field_profile(defect, 0.0, plan.radii, dirs), field_profile(defect, 1.0, plan.radii, dirs)};
}

TorsionResult torsion_order_mod_H(const Map& map, int k_max, const SamplingPlan& plan, double tol,
                                  const TrendRules& rules) {
  if (k_max < 1) throw Error(ErrorCode::InvalidArgument, "k_max must be at least 1");
  const Map id = Map::identity(map.dimension());
  TorsionResult result;
  for (int k = 1; k <= k_max; ++k) {
    result.powers.push_back(coset_equal_mod_H(power(map, k), id, plan, tol, rules));
    const Verdict& v = result.powers.back();
    if (v.confirmed()) {
      result.order = k;
      result.reason = "power " + std::to_string(k) + " is in H and every lower power is not";
      return result;
    }
    if (!v.refuted()) {
      result.reason = "power " + std::to_string(k) + " is inconclusive, so no order can be certified";
      return result;
    }
  }
  result.reason = "no power up to " + std::to_string(k_max) + " lies in H";
  return result;
}

QICertificate anchor_at_origin(const QICertificate& cert, const Map& map) {
  QICertificate out = cert;
  out.C += evaluate(map, Point::Zero(map.dimension())).norm();
  return out;
}

HAlphaCertificate composition_certificate(const HAlphaCertificate& cert_f, const HAlphaCertificate& cert_g,
                                          const QICertificate& qi_g) {
  if (cert_f.alpha != cert_g.alpha) throw Error(ErrorCode::AlphaMismatch, "certificates use different alpha");
  const double a = cert_f.alpha;
  const double kp = qi_g.K;
  const double cp = qi_g.C;
  HAlphaCertificate out;
  out.alpha = a;
  out.R = std::max({cert_g.R, kp * (cert_f.R + cp), 1.0});
  out.K = (std::pow(kp, a) + std::pow(cp / out.R, a)) * cert_f.K + cert_g.K;
  out.kind = CertificateKind::Derived;
  out.provenance = "composition(sum rule): K = (K'^a + (C'/R)^a) K_f + K_g with K_f=" + fmt(cert_f.K) +
                   ", K_g=" + fmt(cert_g.K) + ", K'=" + fmt(kp) + ", C'=" + fmt(cp) + "; f[" + cert_f.provenance +
                   "]; g[" + cert_g.provenance + "]";
  return out;
}

HAlphaCertificate composition_certificate_max_rule(const HAlphaCertificate& cert_f, const HAlphaCertificate& cert_g,
                                                   const QICertificate& qi_g) {
  if (cert_f.alpha != cert_g.alpha) throw Error(ErrorCode::AlphaMismatch, "certificates use different alpha");
  HAlphaCertificate out;
  out.alpha = cert_f.alpha;
  out.K = std::max(std::pow(qi_g.K, cert_f.alpha) * cert_f.K, cert_g.K);
  out.R = std::max(cert_f.R, cert_g.R);
  out.kind = CertificateKind::Derived;
  out.provenance = "composition(max rule): K = max(K'^a K_f, K_g)";
  return out;
}

HAlphaCertificate conjugation_certificate(const QICertificate& qi_f, const QICertificate& qi_finv,
                                          const HAlphaCertificate& cert_g, double equiv_slack) {
  if (!(equiv_slack >= 0.0)) throw Error(ErrorCode::InvalidArgument, "equivalence slack must be non-negative");
  const double al = cert_g.alpha;
  const double lambda = qi_f.K;
  const double a = qi_finv.K;
  const double b = qi_finv.C;
  HAlphaCertificate out;
  out.alpha = al;
  out.K = lambda * cert_g.K * std::pow(a, al) + lambda * cert_g.K * std::pow(b, al) + qi_f.C + equiv_slack;
  out.R = std::max(1.0, a * (cert_g.R + b));
  out.kind = CertificateKind::Derived;
  out.provenance = "conjugation: K = l K_g a^al + l K_g b^al + C + mu with l=" + fmt(lambda) + ", a=" + fmt(a) +
                   ", b=" + fmt(b) + ", C=" + fmt(qi_f.C) + ", mu=" + fmt(equiv_slack) + "; g[" +
                   cert_g.provenance + "]";
  return out;
}

WitnessResult build_witness_sequence(const Map& f, const SamplingPlan& plan, double eps_floor,
                                     const TrendRules& rules) {
  if (!(eps_floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps_floor must be positive");
  WitnessResult out;
  out.membership = membership_H(f, plan, eps_floor, rules);
  if (!out.membership.refuted()) {
    throw Error(ErrorCode::NotOutsideH, "membership_H is not refuted, so no witness sequence exists on this plan");
  }
  double last_norm = -1.0, last_image = -1.0, last_disp = -1.0;
  double eps = std::numeric_limits<double>::infinity();
  for (const auto& e : out.membership.profile->entries) {
    if (e.sup_ratio < eps_floor) continue;
    const Point a = e.radius * e.argmax_direction;
    const Point fa = evaluate(f, a);
    const double na = a.norm();
    const double nf = fa.norm();
    const double d = (fa - a).norm();
    if (na > last_norm && na > last_image && nf > last_image && d > last_disp) {
      out.sequence.points.push_back(a);
      last_norm = na;
      last_image = nf;
      last_disp = d;
      eps = std::min(eps, d / na);
    }
  }
  const auto& pts = out.sequence.points;
  if (pts.size() < 3 || pts.back().norm() < plan.r_max() / 10.0) {
    throw Error(ErrorCode::InsufficientAnnuli, "fewer than 3 usable witness points reach r_max / 10");
  }
  out.epsilon = eps;
  out.sequence.description = "argmax points of the H-profile with ratio >= " + fmt(eps_floor) +
                             ", greedily filtered for increasing |a|, |f(a)|, |f(a) - a| and |a_next| > |f(a)|";
  return out;
}

double gadget_radius(const Map& f, const Point& a, double epsilon, const RadiusRule& rule) {
  const double half_disp = 0.5 * displacement(f, a);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, CenterRule>) {
          return std::min(std::ceil(0.5 * epsilon * a.norm()), half_disp);
        } else {
          return std::min(std::floor(std::pow(a.norm(), 0.5 * r.alpha) / (r.K + 1.0)), half_disp);
        }
      },
      rule);
}

namespace {

struct Selection {
  std::vector<Point> centers;
  std::vector<double> radii;
  std::vector<Point> witnesses;
};

Selection select_balls(const Map& f, const WitnessSequence& seq, double epsilon, const RadiusRule& rule) {
  std::vector<Point> images;
  for (const auto& a : seq.points) images.push_back(evaluate(f, a));
  Selection s;
  for (std::size_t i = 0; i < seq.points.size(); ++i) {
    const Point& c = images[i];
    const double r = gadget_radius(f, seq.points[i], epsilon, rule);
    if (!(r > 0.0) || (!s.radii.empty() && r <= s.radii.back())) continue;
    bool ok = true;
    for (std::size_t j = 0; ok && j < s.centers.size(); ++j) {
      ok = (c - s.centers[j]).norm() > r + s.radii[j];
    }
    for (std::size_t j = 0; ok && j < seq.points.size(); ++j) {
      ok = (seq.points[j] - c).norm() > r && (j == i || (images[j] - c).norm() > r);
    }
    if (ok) {
      s.centers.push_back(c);
      s.radii.push_back(r);
      s.witnesses.push_back(seq.points[i]);
    }
  }
  return s;
}

}  // namespace

GadgetResult build_ball_gadget(const Map& f, const WitnessSequence& seq, double epsilon, const RadiusRule& rule) {
  const int n = f.dimension();
  for (const auto& p : seq.points) {
    if (p.size() != n) throw Error(ErrorCode::DimensionMismatch, "witness point dimension differs from map");
  }
  const bool center_rule = std::holds_alternative<CenterRule>(rule);
  if (center_rule && !(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  const int max_halvings = center_rule ? 16 : 0;
  double eps = epsilon;
  for (int h = 0; h <= max_halvings; ++h, eps *= 0.5) {
    Selection s = select_balls(f, seq, eps, rule);
    if (s.centers.size() < 2) continue;
    GadgetData data;
    data.centers = std::move(s.centers);
    data.radii = std::move(s.radii);
    data.drift_fraction = 0.25;
    data.axis = n - 1;
    if (center_rule) {
      data.provenance = "inner map h(y) = y + 0.25 max(0, 1 - |y|) e_n; r = min(ceil(eps/2 |a|), |f(a) - a|/2), eps=" +
                        fmt(eps);
    } else {
      const auto& cr = std::get<CentralizerRule>(rule);
      data.provenance = "inner map h(y) = y + 0.25 max(0, 1 - |y|) e_n; r = min(floor(|a|^(alpha/2) / (K+1)), "
                        "|f(a) - a|/2), alpha=" + fmt(cr.alpha) + ", K=" + fmt(cr.K);
    }
    GadgetResult out{Map::gadget(n, data), data, std::move(s.witnesses), center_rule ? eps : 0.0, h};
    return out;
  }
  throw Error(ErrorCode::WitnessTooSparse, "could not place two disjoint gadget balls along the witness sequence");
}

Verdict check_gadget_identities(const Map& f, const GadgetResult& gadget, GadgetIdentities* out) {
  GadgetIdentities ids;
  ids.min_ratio = std::numeric_limits<double>::infinity();
  const double df = gadget.data.drift_fraction;
  for (std::size_t k = 0; k < gadget.witnesses.size(); ++k) {
    const Point& a = gadget.witnesses[k];
    const Point& c = gadget.data.centers[k];
    const double expected = df * gadget.data.radii[k];
    const double s1 = (evaluate(gadget.gadget, c) - c).norm();
    const double s2 = (evaluate(f, evaluate(gadget.gadget, a)) - evaluate(gadget.gadget, evaluate(f, a))).norm();
    ids.step1.push_back(s1);
    ids.step2.push_back(s2);
    ids.ratios.push_back(s2 / a.norm());
    ids.min_ratio = std::min(ids.min_ratio, s2 / a.norm());
    ids.max_relative_error =
        std::max({ids.max_relative_error, std::abs(s1 - expected) / expected, std::abs(s2 - expected) / expected});
  }
  Verdict v;
  const double bound = gadget.epsilon * df / 2.0;
  v.thresholds = {{"identity_rel_tol", 1e-9}, {"ratio_bound", bound}, {"epsilon", gadget.epsilon}};
  v.metrics = {{"min_ratio", ids.min_ratio}, {"max_relative_error", ids.max_relative_error}};
  v.series = {{"step1", ids.step1}, {"step2", ids.step2}, {"ratios", ids.ratios}};
  for (std::size_t k = 0; k < gadget.witnesses.size(); ++k) {
    v.witnesses.push_back({"witness_point", gadget.witnesses[k], gadget.data.centers[k], ids.ratios[k]});
  }
  if (ids.max_relative_error <= 1e-9 && ids.min_ratio >= bound - 1e-9) {
    v.status = Status::Confirmed;
    v.reason = "both gadget identities hold at every witness point";
  } else {
    v.status = Status::Refuted;
    v.reason = "a gadget identity or the commutator lower bound fails at a witness point";
  }
  if (out) *out = std::move(ids);
  return v;
}

RatioProfile gadget_alpha_profile(const GadgetData& data, double alpha) {
  if (data.centers.empty()) throw Error(ErrorCode::EmptyProfile, "gadget has no balls");
  const int n = static_cast<int>(data.centers.front().size());
  const Map g = Map::gadget(n, data);
  std::vector<std::size_t> order(data.centers.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return data.centers[i].norm() < data.centers[j].norm(); });

  RatioProfile profile;
  profile.exponent = alpha;
  constexpr int kSteps = 16;
  for (std::size_t k : order) {
    const Point& c = data.centers[k];
    const double r = data.radii[k];
    const double nc = c.norm();
    if (nc == 0.0) continue;
    const Point inward = -c / nc;
    std::vector<Point> offsets;
    for (int t = 0; t <= kSteps; ++t) offsets.push_back(inward * (r * t / kSteps));
    for (int ax = 0; ax < n; ++ax) {
      for (int t = 1; t <= kSteps; t *= 2) {
        offsets.push_back(basis_vector(n, ax) * (r * t / kSteps));
        offsets.push_back(-basis_vector(n, ax) * (r * t / kSteps));
      }
    }
    ProfileEntry e;
    e.radius = nc;
    e.sup_ratio = -1.0;
    e.inf_ratio = std::numeric_limits<double>::infinity();
    for (const auto& off : offsets) {
      const Point x = c + off;
      const double ratio = displacement(g, x) / std::pow(x.norm(), alpha);
      if (ratio > e.sup_ratio) {
        e.sup_ratio = ratio;
        e.argmax_direction = x / x.norm();
      }
      e.inf_ratio = std::min(e.inf_ratio, ratio);
    }
    profile.entries.push_back(std::move(e));
  }
  return profile;
}

Verdict check_gadget_decay(RatioProfile profile, double tol, const TrendRules& rules) {
  if (profile.entries.empty()) throw Error(ErrorCode::EmptyProfile, "no gadget balls to profile");
  std::vector<double> s;
  for (const auto& e : profile.entries) s.push_back(e.sup_ratio);
  bool down = true, up = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    down = down && s[i] <= s[i - 1] * (1.0 + rules.monotone_rel);
    up = up && s[i] >= s[i - 1] * (1.0 - rules.monotone_rel);
  }
  Verdict v;
  v.thresholds = {{"tol", tol}, {"monotone_rel", rules.monotone_rel}};
  v.metrics = {{"last_sup", s.back()}, {"first_sup", s.front()}};
  v.series["sup_ratio"] = s;
  if (down && s.back() < tol) {
    v.status = Status::Confirmed;
    v.reason = "gadget alpha-profile decreases monotonically below tol";
  } else if (up && *std::min_element(s.begin(), s.end()) >= tol) {
    v.status = Status::Refuted;
    v.reason = "gadget alpha-profile does not decay";
  } else {
    v.status = Status::Inconclusive;
    v.reason = "gadget alpha-profile is not monotone or ends above tol";
  }
  v.profile = std::move(profile);
  return v;
}

}  // namespace qilab
