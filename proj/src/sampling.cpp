#include "qilab/sampling.hpp"

#include "qilab/error.hpp"

#include <cmath>
#include <numbers>

namespace qilab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SamplingPlan SamplingPlan::geometric(int dimension, double r_min, double ratio, int annuli, int directions,
                                     int pair_samples, std::uint64_t seed) {
  if (!(r_min > 0.0) || !(ratio > 1.0) || annuli < 1) {
    throw Error(ErrorCode::InvalidPlan, "geometric plan needs r_min > 0, ratio > 1, annuli >= 1");
  }
  SamplingPlan plan;
  plan.dimension = dimension;
  plan.directions_per_annulus = directions;
  plan.pair_samples = pair_samples;
  plan.seed = seed;
  for (int i = 0; i < annuli; ++i) plan.radii.push_back(r_min * std::pow(ratio, i));
  plan.validate();
  return plan;
}

void SamplingPlan::validate() const {
  if (radii.empty()) throw Error(ErrorCode::EmptyPlan, "sampling plan has no radii");
  if (dimension < 1) throw Error(ErrorCode::InvalidPlan, "plan dimension must be >= 1");
  if (directions_per_annulus < 1) throw Error(ErrorCode::InvalidPlan, "directions_per_annulus must be >= 1");
  if (pair_samples < 1) throw Error(ErrorCode::InvalidPlan, "pair_samples must be >= 1");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) throw Error(ErrorCode::InvalidPlan, "radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw Error(ErrorCode::InvalidPlan, "radii must be strictly increasing");
  }
}

SamplingPlan default_plan(int dimension) { return SamplingPlan::geometric(dimension, 1e2, 10.0, 8); }

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t annulus, std::uint64_t purpose) {
  return std::mt19937_64(splitmix64(splitmix64(seed ^ splitmix64(annulus)) ^ (purpose * 0x2545f4914f6cdd1dULL)));
}

Point random_unit(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Point p(dim);
  do {
    for (int i = 0; i < dim; ++i) p[i] = normal(rng);
  } while (p.norm() < 1e-12);
  return p / p.norm();
}

std::vector<Point> base_directions(const SamplingPlan& plan) {
  const int n = plan.dimension;
  const int count = plan.directions_per_annulus;
  std::vector<Point> dirs;
  if (n == 1) {
    dirs.push_back(Point::Constant(1, 1.0));
    dirs.push_back(Point::Constant(1, -1.0));
    return dirs;
  }
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * (i + 0.5) / count;
      Point p(2);
      p << std::cos(t), std::sin(t);
      dirs.push_back(p);
    }
    return dirs;
  }
  if (n == 3) {
    // Fibonacci spiral: z stratified over (-1, 1), golden-angle longitude.
    const double dz = 2.0 / count;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double z = -1.0 + (i + 0.5) * dz;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double t = golden * i;
      Point p(3);
      p << rho * std::cos(t), rho * std::sin(t), z;
      dirs.push_back(p / p.norm());
    }
    return dirs;
  }
  auto rng = stream_rng(plan.seed, 0, 1);
  for (int i = 0; i < count; ++i) dirs.push_back(random_unit(rng, n));
  return dirs;
}

std::vector<Point> probe_directions(const SamplingPlan& plan, std::initializer_list<const Map*> maps) {
  std::vector<Point> dirs = base_directions(plan);
  if (plan.dimension > 1) {
    for (int i = 0; i < plan.dimension; ++i) {
      dirs.push_back(basis_vector(plan.dimension, i));
      dirs.push_back(-basis_vector(plan.dimension, i));
    }
  }
  for (const Map* m : maps) {
    if (m == nullptr) continue;
    for (auto& d : distinguished_directions(*m)) dirs.push_back(std::move(d));
  }
  return dirs;
}

Json plan_to_json(const SamplingPlan& plan) {
  return Json{{"dimension", plan.dimension},
              {"radii", plan.radii},
              {"directions_per_annulus", plan.directions_per_annulus},
              {"pair_samples", plan.pair_samples},
              {"seed", plan.seed}};
}

SamplingPlan plan_from_json(const Json& j, int dimension) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, "plan must be a JSON object");
  try {
    const int dim = j.value("dimension", dimension);
    if (dim != dimension) throw Error(ErrorCode::ConfigError, "plan dimension differs from map dimension");
    SamplingPlan plan = default_plan(dim);
    if (j.contains("radii")) {
      plan.radii = j.at("radii").get<std::vector<double>>();
    } else if (j.contains("r_min") || j.contains("ratio") || j.contains("annuli")) {
      plan.radii = SamplingPlan::geometric(dim, j.value("r_min", 1e2), j.value("ratio", 10.0), j.value("annuli", 8)).radii;
    }
    plan.directions_per_annulus = j.value("directions_per_annulus", plan.directions_per_annulus);
    plan.pair_samples = j.value("pair_samples", plan.pair_samples);
    plan.seed = j.value("seed", plan.seed);
    plan.validate();
    return plan;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed plan: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    throw Error(ErrorCode::ConfigError, e.what());
  }
}

std::string plan_digest(const SamplingPlan& plan) { return digest_hex(plan_to_json(plan).dump()); }

}  // namespace qilab
