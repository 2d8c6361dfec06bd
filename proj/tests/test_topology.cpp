#include "support.hpp"

#include "oracles.hpp"
#include "qilab/topology.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace qilab;

namespace {

Point e(int axis) { return basis_vector(3, axis); }

NeighborhoodSpec spec(Map center, double eps, double R) { return NeighborhoodSpec{std::move(center), eps, R}; }

// r from 1 to 1e9, so any R up to 1e7 leaves two decades above it.
SamplingPlan wide_plan() { return SamplingPlan::geometric(3, 1.0, 10.0, 10); }

}  // namespace

TEST_CASE("the centre belongs to its own neighbourhood") {
  const auto plan = wide_plan();
  for (const Map& f : {Map::identity(3), Map::dilation(3, 3.0), Map::linear_over_log(3)}) {
    for (double eps : {1e-3, 0.5}) {
      CHECK(neighborhood_contains(spec(f, eps, 100.0), f, plan).confirmed());
    }
  }
}

TEST_CASE("dilations around the identity") {
  const auto plan = wide_plan();
  const Verdict in = neighborhood_contains(spec(Map::identity(3), 0.1, 100.0), Map::dilation(3, 1.05), plan);
  CHECK(in.confirmed());
  CHECK(in.metrics.at("sup") == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(neighborhood_contains(spec(Map::identity(3), 0.1, 100.0), Map::dilation(3, 1.2), plan).refuted());
  CHECK(neighborhood_contains(spec(Map::identity(3), 0.1, 100.0), Map::dilation(3, 0.85), plan).refuted());
}

TEST_CASE("log drift near the identity") {
  const auto plan = wide_plan();
  const Verdict v = neighborhood_contains(spec(Map::identity(3), 0.05, 100.0), Map::log_drift(1.0, e(0)), plan);
  CHECK(v.confirmed());
  CHECK(v.metrics.at("sup") == doctest::Approx(std::log(101.0) / 100.0).epsilon(1e-12));
  CHECK(neighborhood_contains(spec(Map::identity(3), 0.04, 100.0), Map::log_drift(1.0, e(0)), plan).refuted());
}

TEST_CASE("translating the centre does not change membership") {
  const auto plan = wide_plan();
  const Map g = Map::dilation(3, 1.05);
  for (double shift : {0.0, 1.0, 10.0}) {
    const Map center = Map::translation(e(1) * shift);
    CHECK(neighborhood_contains(spec(center, 0.1, 1000.0), g, plan).confirmed());
    CHECK(neighborhood_contains(spec(center, 0.04, 1000.0), g, plan).refuted());
  }
}

TEST_CASE("neighbourhood preconditions") {
  CHECK_CODE(neighborhood_contains(spec(Map::identity(3), 0.1, 1e8), Map::identity(3), wide_plan()),
             ErrorCode::InvalidPlan);
  CHECK_CODE(neighborhood_contains(spec(Map::identity(2), 0.1, 10.0), Map::identity(2), wide_plan()),
             ErrorCode::DimensionMismatch);
  CHECK_CODE(spec(Map::identity(3), 0.0, 1.0).validate(), ErrorCode::InvalidArgument);
  CHECK_CODE(spec(Map::identity(3), 0.1, -1.0).validate(), ErrorCode::InvalidArgument);
}

TEST_CASE("neighbourhood JSON") {
  const auto s = spec(Map::dilation(3, 1.5), 0.2, 50.0);
  const auto back = neighborhood_from_json(neighborhood_to_json(s), 3);
  CHECK(back.center == s.center);
  CHECK(back.epsilon == 0.2);
  CHECK(back.R == 50.0);
  CHECK_CODE(neighborhood_from_json(Json{{"epsilon", 0.1}, {"R", 1.0}}, 3), ErrorCode::ConfigError);
  CHECK_CODE(neighborhood_from_json(Json{{"center", {{"op", "identity"}}}, {"epsilon", -1}, {"R", 1.0}}, 3),
             ErrorCode::ConfigError);
}

TEST_CASE("refining an intersection") {
  const auto plan = wide_plan();
  const auto same = refine_intersection(spec(Map::identity(3), 0.1, 100.0), spec(Map::identity(3), 0.1, 100.0),
                                        Map::identity(3), plan);
  CHECK(same.A1 == 0.0);
  CHECK(same.A2 == 0.0);
  CHECK(same.spec.epsilon == 0.1);
  CHECK(same.spec.R == 100.0);

  const auto s1 = spec(Map::identity(3), 0.1, 100.0);
  const auto s2 = spec(Map::dilation(3, 1.01), 0.1, 100.0);
  const auto r = refine_intersection(s1, s2, Map::identity(3), plan);
  CHECK(r.A1 == 0.0);
  CHECK(r.A2 == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(r.spec.epsilon == doctest::Approx(0.09).epsilon(1e-12));
  CHECK(r.spec.R == 100.0);
  CHECK(r.spec.center == Map::identity(3));

  // Members of the refined neighbourhood sit in both parents.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> stretch(-0.085, 0.085);
  for (int i = 0; i < 16; ++i) {
    const Map g = compose(Map::dilation(3, 1.0 + stretch(rng)), Map::log_drift(0.1, e(i % 3)));
    if (!neighborhood_contains(r.spec, g, plan).confirmed()) continue;
    CHECK(neighborhood_contains(s1, g, plan).confirmed());
    CHECK(neighborhood_contains(s2, g, plan).confirmed());
  }

  CHECK_CODE(refine_intersection(s1, s2, Map::dilation(3, 1.5), plan), ErrorCode::NotInIntersection);
}

TEST_CASE("clamp construction") {
  const Map id = clamp_to_alpha(Map::identity(3), 0.5, 1.0, 10.0);
  for (double r : {1.0, 1e3, 1e8}) CHECK((evaluate(id, e(2) * r) - e(2) * r).norm() == 0.0);

  // First branch: a small drift never reaches C|x|^α.
  const Map small = Map::log_drift(1e-3, e(0));
  const Map g_small = clamp_to_alpha(small, 0.5, 1.0, 10.0);
  for (double r : {1e2, 1e5, 1e9}) {
    const Point x = e(1) * r;
    CHECK((evaluate(g_small, x) - evaluate(small, x)).norm() == 0.0);
  }

  // Second branch: r / ln(2 + r) > √r, so the displacement is √r up to the
  // rounding of x + v, a few ulps of |x|.
  const Map g = clamp_to_alpha(Map::linear_over_log(3), 0.5, 1.0, 10.0);
  for (double r : {1e2, 1e4, 1e6, 1e9}) {
    REQUIRE(oracle::linear_over_log_ratio(r) * r > std::sqrt(r));
    const Point x = (e(0) + e(2)).normalized() * r;
    const double disp = (evaluate(g, x) - x).norm();
    CHECK(std::abs(disp - std::sqrt(r)) <= 8.0 * std::numeric_limits<double>::epsilon() * (r + std::sqrt(r)));
    CHECK(disp <= std::sqrt(r) * (1.0 + 1e-12));
  }
  CHECK((evaluate(g, e(0) * 5.0) - e(0) * 5.0).norm() == 0.0);

  CHECK_CODE(clamp_to_alpha(Map::identity(3), 1.0, 1.0, 1.0), ErrorCode::AlphaOutOfRange);
}

TEST_CASE("density witness for linear over log") {
  const auto plan = wide_plan();
  const auto rep = density_witness(Map::linear_over_log(3), 0.5, 10.0, 0.5, 1.0, plan);
  const double threshold = oracle::linear_over_log_threshold(0.25);
  CHECK(threshold == doctest::Approx(std::exp(4.0) - 2.0));
  CHECK(rep.R0 == oracle::first_radius_at_least(plan.radii, 10.0, threshold));
  CHECK(rep.membership.confirmed());
  CHECK(rep.claim1.confirmed());
  CHECK(rep.claim2.confirmed());
  CHECK(rep.claim3.confirmed());
  CHECK(rep.all_confirmed());
}

TEST_CASE("density witness for identity and log drift") {
  const auto plan = wide_plan();
  const auto id = density_witness(Map::identity(3), 0.1, 10.0, 0.5, 1.0, plan);
  CHECK(id.all_confirmed());
  CHECK(evaluate(id.g, e(0) * 1e6) == e(0) * 1e6);

  const auto drift = density_witness(Map::log_drift(1.0, e(0)), 0.05, 100.0, 0.3, 1.0, plan);
  CHECK(drift.R0 == oracle::first_radius_at_least(plan.radii, 100.0, oracle::log_drift_threshold(0.025)));
  CHECK(drift.all_confirmed());
}

TEST_CASE("density witness preconditions") {
  const auto plan = wide_plan();
  CHECK_CODE(density_witness(Map::dilation(3, 2.0), 0.1, 10.0, 0.5, 1.0, plan), ErrorCode::NotInH);
  // 1/ln(2 + r) <= 0.025 needs r >= e^40, far beyond the plan.
  CHECK_CODE(density_witness(Map::linear_over_log(3), 0.05, 10.0, 0.5, 1.0, plan), ErrorCode::NoSuitableR0);
}
