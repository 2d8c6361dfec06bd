#pragma once

// Basic neighbourhoods of the asymptotic topology,
//   U(f; ε, R) = { g : sup_{|x| >= R} |g(x) - f(x)| / |x| < ε },
// the refinement step of the basis axiom, and the clamp construction that
// approximates members of H by members of H_α.

#include "qilab/asymptotics.hpp"
#include "qilab/dsl.hpp"
#include "qilab/map.hpp"
#include "qilab/qi_certifier.hpp"
#include "qilab/sampling.hpp"
#include "qilab/verdict.hpp"

namespace qilab {

struct NeighborhoodSpec {
  Map center;
  double epsilon = 0.1;
  double R = 1.0;

  /// Throws InvalidArgument unless epsilon > 0 and R > 0.
  void validate() const;
};

Json neighborhood_to_json(const NeighborhoodSpec& spec);
/// {"center": <map node>, "epsilon": x, "R": x}; "dimension" is optional when
/// a dimension is supplied by the caller.
NeighborhoodSpec neighborhood_from_json(const Json& j, int dimension);

/// Sampled sup of |g(x) - f(x)| / |x| at |x| = R and at every plan radius
/// above R. Confirmed when every value is below ε(1 - margin) and the profile
/// is non-increasing; Refuted when some value reaches ε. Throws InvalidPlan
/// unless r_max >= 100 R.
Verdict neighborhood_contains(const NeighborhoodSpec& spec, const Map& g, const SamplingPlan& plan,
                              double margin = 1e-3, const TrendRules& rules = {});

struct RefineResult {
  NeighborhoodSpec spec;
  double A1 = 0.0;
  double A2 = 0.0;
  Verdict contains1;
  Verdict contains2;
};

/// (h, min(ε_1 - A_1, ε_2 - A_2), max(R_1, R_2)) with A_i the sampled sup
/// distance from h to f_i beyond R_i. Throws NotInIntersection unless h is
/// Confirmed in both neighbourhoods.
RefineResult refine_intersection(const NeighborhoodSpec& s1, const NeighborhoodSpec& s2, const Map& h,
                                 const SamplingPlan& plan, double margin = 1e-3, const TrendRules& rules = {});

/// g(x) = x for |x| < R0; beyond R0 the displacement f(x) - x is kept when
/// its norm is at most C|x|^α and rescaled to norm C|x|^α otherwise.
Map clamp_to_alpha(const Map& f, double alpha, double C, double R0);

struct DensityReport {
  Map g;
  double R0 = 0.0;
  QICertificate qi_f;
  double derived_K = 0.0;
  double derived_C = 0.0;
  Verdict membership;  // H-membership of f
  Verdict claim1;      // QI inequalities for g
  Verdict claim2;      // g in H_α with constant at most C
  Verdict claim3;      // g in U(f; ε, R)

  bool all_confirmed() const { return claim1.confirmed() && claim2.confirmed() && claim3.confirmed(); }
};

/// Picks R0 >= R from f's H-profile (smallest plan radius whose tail sup is
/// at most ε/2), builds the clamp and checks the three claims on the plan.
/// Throws NotInH unless membership_H(f) is Confirmed at tol, NoSuitableR0
/// when no plan radius qualifies.
DensityReport density_witness(const Map& f, double epsilon, double R, double alpha, double C,
                              const SamplingPlan& plan, double tol = 1e-2, double margin = 1e-3,
                              const TrendRules& rules = {});

}  // namespace qilab
