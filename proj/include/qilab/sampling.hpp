#pragma once

// Deterministic sampling schedules. Every estimator in the library reads its
// points from a SamplingPlan, so (plan, seed) fixes every sample.

#include "qilab/dsl.hpp"
#include "qilab/map.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace qilab {

struct SamplingPlan {
  int dimension = 3;
  std::vector<double> radii;  // strictly increasing, positive
  int directions_per_annulus = 64;
  int pair_samples = 96;
  std::uint64_t seed = 20240601;

  /// radii r_min * ratio^i for i in [0, annuli).
  static SamplingPlan geometric(int dimension, double r_min, double ratio, int annuli, int directions = 64,
                                int pair_samples = 96, std::uint64_t seed = 20240601);

  /// Throws EmptyPlan for no radii, InvalidPlan for anything else malformed.
  void validate() const;

  double r_min() const { return radii.front(); }
  double r_max() const { return radii.back(); }

  bool operator==(const SamplingPlan&) const = default;
};

/// r_min = 1e2, ratio 10, 8 annuli up to 1e9, 64 directions.
SamplingPlan default_plan(int dimension);

/// Generalized-spiral directions on S^{n-1} for n <= 3 and seeded normalized
/// Gaussian samples above that.
std::vector<Point> base_directions(const SamplingPlan& plan);

/// base_directions, then ±e_i for every axis, then the distinguished
/// directions of every listed map.
std::vector<Point> probe_directions(const SamplingPlan& plan, std::initializer_list<const Map*> maps);

/// Independent stream for (seed, annulus, purpose).
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t annulus, std::uint64_t purpose);

/// Uniform point on S^{n-1}.
Point random_unit(std::mt19937_64& rng, int dim);

Json plan_to_json(const SamplingPlan& plan);
/// Accepts either explicit "radii" or {"r_min","ratio","annuli"}; missing
/// fields fall back to default_plan(dimension).
SamplingPlan plan_from_json(const Json& j, int dimension);
std::string plan_digest(const SamplingPlan& plan);

}  // namespace qilab
