#include "qilab/topology.hpp"

#include "qilab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qilab {

void NeighborhoodSpec::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "neighborhood epsilon must be positive");
  }
  if (!(R > 0.0) || !std::isfinite(R)) throw Error(ErrorCode::InvalidArgument, "neighborhood R must be positive");
}

Json neighborhood_to_json(const NeighborhoodSpec& spec) {
  return Json{{"dimension", spec.center.dimension()},
              {"center", map_to_json(spec.center)},
              {"epsilon", spec.epsilon},
              {"R", spec.R}};
}

NeighborhoodSpec neighborhood_from_json(const Json& j, int dimension) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "neighborhood spec must be a JSON object");
  int dim = dimension;
  if (j.contains("dimension")) {
    if (!j["dimension"].is_number_integer()) throw Error(ErrorCode::ConfigError, "dimension must be an integer");
    dim = j["dimension"].get<int>();
    if (dimension > 0 && dim != dimension) {
      throw Error(ErrorCode::ConfigError, "neighborhood dimension differs from the session dimension");
    }
  }
  if (dim < 1) throw Error(ErrorCode::ConfigError, "neighborhood spec needs a dimension");
  for (const char* key : {"center", "epsilon", "R"}) {
    if (!j.contains(key)) throw Error(ErrorCode::ConfigError, std::string("neighborhood spec lacks '") + key + "'");
  }
  if (!j["epsilon"].is_number() || !j["R"].is_number()) {
    throw Error(ErrorCode::ConfigError, "epsilon and R must be numbers");
  }
  NeighborhoodSpec spec{map_from_json(j["center"], dim, "/center"), j["epsilon"].get<double>(), j["R"].get<double>()};
  try {
    spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return spec;
}

Verdict neighborhood_contains(const NeighborhoodSpec& spec, const Map& g, const SamplingPlan& plan, double margin,
                              const TrendRules& rules) {
  spec.validate();
  plan.validate();
  const Map& f = spec.center;
  if (f.dimension() != g.dimension() || plan.dimension != g.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "neighborhood, map and plan dimensions differ");
  }
  if (plan.r_max() < 100.0 * spec.R) throw Error(ErrorCode::InvalidPlan, "plan must reach at least 100 R");
  if (!(margin >= 0.0 && margin < 1.0)) throw Error(ErrorCode::InvalidArgument, "margin must lie in [0, 1)");

  std::vector<double> radii{spec.R};
  for (double r : plan.radii) {
    if (r > spec.R) radii.push_back(r);
  }
  const auto dirs = probe_directions(plan, {&f, &g});
  auto profile =
      field_profile([&](const Point& x) -> Point { return evaluate(g, x) - evaluate(f, x); }, 1.0, radii, dirs);

  std::vector<double> s;
  for (const auto& e : profile.entries) s.push_back(e.sup_ratio <= rules.noise_floor ? 0.0 : e.sup_ratio);
  const double sup = *std::max_element(s.begin(), s.end());
  bool monotone = true;
  for (std::size_t i = 1; i < s.size(); ++i) monotone = monotone && s[i] <= s[i - 1] * (1.0 + rules.monotone_rel);

  Verdict v;
  v.thresholds = {{"epsilon", spec.epsilon},
                  {"R", spec.R},
                  {"margin", margin},
                  {"noise_floor", rules.noise_floor},
                  {"monotone_rel", rules.monotone_rel}};
  v.metrics = {{"sup", sup}};
  v.series["sup_ratio"] = s;
  if (sup >= spec.epsilon) {
    v.status = Status::Refuted;
    v.reason = "a sampled point beyond R is at relative distance >= epsilon";
    for (const auto& e : profile.entries) {
      if (e.sup_ratio >= spec.epsilon) {
        v.witnesses.push_back({"outside", e.radius * e.argmax_direction, std::nullopt, e.sup_ratio});
      }
    }
  } else if (sup < spec.epsilon * (1.0 - margin) && monotone) {
    v.status = Status::Confirmed;
    v.reason = "sampled relative distance stays below epsilon with a non-increasing profile";
  } else {
    v.status = Status::Inconclusive;
    v.reason = monotone ? "sampled sup falls inside the margin below epsilon" : "relative distance profile is not monotone";
  }
  v.profile = std::move(profile);
  return v;
}

RefineResult refine_intersection(const NeighborhoodSpec& s1, const NeighborhoodSpec& s2, const Map& h,
                                 const SamplingPlan& plan, double margin, const TrendRules& rules) {
  RefineResult out{s1, 0.0, 0.0, neighborhood_contains(s1, h, plan, margin, rules),
                   neighborhood_contains(s2, h, plan, margin, rules)};
  if (!out.contains1.confirmed() || !out.contains2.confirmed()) {
    throw Error(ErrorCode::NotInIntersection, "h is not confirmed in both neighborhoods");
  }
  out.A1 = out.contains1.metrics.at("sup");
  out.A2 = out.contains2.metrics.at("sup");
  out.spec = NeighborhoodSpec{h, std::min(s1.epsilon - out.A1, s2.epsilon - out.A2), std::max(s1.R, s2.R)};
  return out;
}

Map clamp_to_alpha(const Map& f, double alpha, double C, double R0) { return Map::clamp(f, alpha, C, R0); }

DensityReport density_witness(const Map& f, double epsilon, double R, double alpha, double C,
                              const SamplingPlan& plan, double tol, double margin, const TrendRules& rules) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1)");
  if (!(epsilon > 0.0) || !(R > 0.0) || !(C > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon, R and C must be positive");
  }
  Verdict membership = membership_H(f, plan, tol, rules);
  if (!membership.confirmed()) throw Error(ErrorCode::NotInH, "membership_H is not confirmed for f");

  // R0: smallest plan radius >= R beyond which every sampled H-ratio is <= ε/2.
  const auto& entries = membership.profile->entries;
  std::optional<double> r0;
  for (std::size_t i = entries.size(); i-- > 0;) {
    if (entries[i].sup_ratio > epsilon / 2.0) break;
    if (entries[i].radius >= R) r0 = entries[i].radius;
  }
  if (!r0) throw Error(ErrorCode::NoSuitableR0, "H-profile never stays below epsilon/2 within the plan");

  Map g = clamp_to_alpha(f, alpha, C, *r0);
  DensityReport rep{g, *r0, estimate_qi_constants(f, plan), 0.0, 0.0, std::move(membership), {}, {}, {}};

  // QI claim: derived constants, checked on pairs from an independent seed.
  const QICertificate qi_g = estimate_qi_constants(g, plan);
  rep.derived_K = std::max(rep.qi_f.K + 2.0 + alpha * C, qi_g.K);
  rep.derived_C = std::max(rep.qi_f.C + C * (alpha * *r0 + 1.0 - alpha), qi_g.C);
  SamplingPlan check_plan = plan;
  check_plan.seed = plan.seed + 1;
  rep.claim1 = check_qi_inequalities(g, rep.derived_K, rep.derived_C, check_plan);
  rep.claim1.metrics["f_K"] = rep.qi_f.K;
  rep.claim1.metrics["f_C"] = rep.qi_f.C;
  rep.claim1.metrics["sampled_g_K"] = qi_g.K;
  rep.claim1.metrics["sampled_g_C"] = qi_g.C;

  // H_α claim: bounded α-profile whose sampled sup beyond R0 does not exceed C.
  HAlphaResult ha = membership_H_alpha(g, alpha, plan, rules);
  double beyond = 0.0;
  for (const auto& e : ha.verdict.profile->entries) {
    if (e.radius >= *r0) beyond = std::max(beyond, e.sup_ratio);
  }
  rep.claim2 = std::move(ha.verdict);
  rep.claim2.thresholds["C"] = C;
  rep.claim2.metrics["sup_beyond_R0"] = beyond;
  if (rep.claim2.confirmed() && beyond > C * (1.0 + 1e-12)) {
    rep.claim2.status = Status::Refuted;
    rep.claim2.reason = "sampled alpha-ratio beyond R0 exceeds C";
  }

  rep.claim3 = neighborhood_contains(NeighborhoodSpec{f, epsilon, R}, g, plan, margin, rules);
  return rep;
}

}  // namespace qilab
