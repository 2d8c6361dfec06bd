#include "qilab/qi_certifier.hpp"

#include "qilab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qilab {

namespace {

constexpr double kGridBase = 1.0 + 1.0 / 1024.0;
constexpr double kGridMax = 1024.0;
constexpr double kPairRelTol = 1e-12;

struct PairImage {
  double d;  // |x - y|
  double e;  // |f(x) - f(y)|
};

std::vector<PairImage> images(const Map& map, const std::vector<SamplePair>& pairs) {
  std::vector<PairImage> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back({(p.x - p.y).norm(), (evaluate(map, p.x) - evaluate(map, p.y)).norm()});
  }
  return out;
}

double required_C(const std::vector<PairImage>& imgs, double K) {
  double c = 0.0;
  for (const auto& im : imgs) c = std::max({c, im.e - K * im.d, im.d / K - im.e});
  return c;
}

void check_dimension(const Map& map, const SamplingPlan& plan) {
  plan.validate();
  if (plan.dimension != map.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "plan dimension differs from map dimension");
  }
}

}  // namespace

const std::vector<double>& k_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int i = 0;; ++i) {
      const double k = kGridBase * std::exp2(i / 8.0);
      if (k > kGridMax) break;
      g.push_back(k);
    }
    return g;
  }();
  return grid;
}

std::vector<SamplePair> sample_pairs(const SamplingPlan& plan) {
  plan.validate();
  const int n = plan.dimension;
  const int per_regime = std::max(1, plan.pair_samples / 3);
  std::vector<SamplePair> pairs;
  pairs.reserve(plan.radii.size() * 3 * static_cast<std::size_t>(per_regime));
  for (std::size_t i = 0; i < plan.radii.size(); ++i) {
    const double r = plan.radii[i];
    const double other = plan.radii.size() == 1 ? 2.0 * r
                         : i + 1 < plan.radii.size() ? plan.radii[i + 1]
                                                     : plan.radii[i - 1];
    auto rng = stream_rng(plan.seed, i, 2);
    for (int k = 0; k < per_regime; ++k) {
      Point u = random_unit(rng, n);
      Point w = random_unit(rng, n);
      pairs.push_back({r * u, r * u + (r / 100.0) * w});
    }
    for (int k = 0; k < per_regime; ++k) {
      Point u = random_unit(rng, n);
      pairs.push_back({r * u, -r * u});
    }
    for (int k = 0; k < per_regime; ++k) {
      Point u = random_unit(rng, n);
      Point w = random_unit(rng, n);
      pairs.push_back({r * u, other * w});
    }
  }
  return pairs;
}

QICertificate estimate_qi_constants(const Map& map, const SamplingPlan& plan) {
  check_dimension(map, plan);
  const auto pairs = sample_pairs(plan);
  const auto imgs = images(map, pairs);

  QICertificate cert;
  cert.plan_digest = plan_digest(plan);
  cert.evidence.pairs = pairs.size();
  cert.evidence.max_upper_ratio = 0.0;
  cert.evidence.min_lower_ratio = std::numeric_limits<double>::infinity();
  std::size_t worst_upper = 0;
  std::size_t worst_lower = 0;
  for (std::size_t k = 0; k < imgs.size(); ++k) {
    const double ratio = imgs[k].e / imgs[k].d;
    if (ratio > cert.evidence.max_upper_ratio) {
      cert.evidence.max_upper_ratio = ratio;
      worst_upper = k;
    }
    if (ratio < cert.evidence.min_lower_ratio) {
      cert.evidence.min_lower_ratio = ratio;
      worst_lower = k;
    }
  }
  cert.evidence.witness_pairs.push_back({pairs[worst_upper].x, pairs[worst_upper].y, cert.evidence.max_upper_ratio});
  cert.evidence.witness_pairs.push_back({pairs[worst_lower].x, pairs[worst_lower].y, cert.evidence.min_lower_ratio});

  if (auto form = affine_form(map)) {
    Eigen::JacobiSVD<Matrix> svd(form->first);
    const auto& s = svd.singularValues();
    const double smax = s.maxCoeff();
    const double smin = s.minCoeff();
    if (smin > 0.0) {
      cert.K = std::max({k_grid().front(), smax, 1.0 / smin});
      cert.C = 0.0;
      cert.kind = CertificateKind::Analytic;
      return cert;
    }
  }

  // C(K) is non-increasing in K; take the least C and, among ties, the least K.
  const auto& grid = k_grid();
  const double c_min = required_C(imgs, grid.back());
  for (double k : grid) {
    const double c = required_C(imgs, k);
    if (c <= c_min * (1.0 + 1e-12) + 1e-12) {
      cert.K = k;
      cert.C = c;
      break;
    }
  }
  cert.kind = CertificateKind::Sampled;
  return cert;
}

Verdict check_qi_inequalities(const Map& map, double K, double C, const SamplingPlan& plan) {
  check_dimension(map, plan);
  const auto pairs = sample_pairs(plan);
  Verdict v;
  v.thresholds = {{"K", K}, {"C", C}, {"pair_rel_tol", kPairRelTol}};
  v.metrics["pairs"] = static_cast<double>(pairs.size());
  double worst_excess = 0.0;
  std::optional<std::size_t> worst;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const double d = (pairs[k].x - pairs[k].y).norm();
    const double e = (evaluate(map, pairs[k].x) - evaluate(map, pairs[k].y)).norm();
    const double slack = kPairRelTol * std::max(d, e);
    const double excess = std::max(e - (K * d + C), (d / K - C) - e);
    if (excess > slack && excess > worst_excess) {
      worst_excess = excess;
      worst = k;
    }
  }
  if (worst) {
    const auto& p = pairs[*worst];
    const double ratio = (evaluate(map, p.x) - evaluate(map, p.y)).norm() / (p.x - p.y).norm();
    v.status = Status::Refuted;
    v.reason = "a sampled pair violates the quasi-isometry inequalities";
    v.metrics["worst_excess"] = worst_excess;
    v.witnesses.push_back({"violating_pair", p.x, p.y, ratio});
  } else {
    v.status = Status::Confirmed;
    v.reason = "every sampled pair satisfies both inequalities";
  }
  return v;
}

Verdict check_qi_inequalities(const Map& map, const QICertificate& cert, const SamplingPlan& plan) {
  return check_qi_inequalities(map, cert.K, cert.C, plan);
}

namespace {

// Best preimage found for t: fixed-point iteration s <- s + (t - f(s)), then a
// shrinking pattern search on a grid around the incumbent.
std::pair<Point, double> search_preimage(const Map& map, const Point& t, double bound,
                                         const std::optional<Map>& inverse) {
  const int n = static_cast<int>(t.size());
  auto residual = [&](const Point& s) { return (evaluate(map, s) - t).norm(); };

  Point best = t;
  double best_res = residual(best);
  if (inverse) {
    Point s = evaluate(*inverse, t);
    const double r = residual(s);
    if (r < best_res) {
      best = s;
      best_res = r;
    }
  }
  const double target = bound * 1e-3;
  Point s = best;
  for (int it = 0; it < 64 && best_res > target; ++it) {
    s = s + (t - evaluate(map, s));
    const double r = residual(s);
    if (!std::isfinite(r)) break;
    if (r < best_res) {
      best = s;
      best_res = r;
    }
  }
  if (best_res <= bound) return {best, best_res};

  const int per_axis = n <= 3 ? 5 : 3;
  double width = best_res;
  std::vector<int> idx(n, 0);
  for (int round = 0; round < 200 && best_res > bound && width > bound * 1e-6; ++round) {
    bool improved = false;
    Point incumbent = best;
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      Point cand = incumbent;
      for (int a = 0; a < n; ++a) {
        cand[a] += width * (2.0 * idx[a] / (per_axis - 1) - 1.0);
      }
      const double r = residual(cand);
      if (r < best_res) {
        best = cand;
        best_res = r;
        improved = true;
      }
      int a = 0;
      while (a < n && ++idx[a] == per_axis) idx[a++] = 0;
      if (a == n) break;
    }
    if (!improved) width *= 0.5;
  }
  return {best, best_res};
}

}  // namespace

Verdict check_quasi_surjectivity(const Map& map, const SamplingPlan& plan, double bound) {
  check_dimension(map, plan);
  if (!(bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "surjectivity bound must be positive");
  std::optional<Map> inverse;
  try {
    inverse = exact_inverse(map);
  } catch (const Error&) {
  }
  const auto dirs = base_directions(plan);
  Verdict v;
  v.thresholds = {{"bound", bound}};
  double worst = 0.0;
  std::size_t targets = 0;
  std::size_t uncovered = 0;
  Witness worst_witness{"worst_target", Point::Zero(plan.dimension), std::nullopt, 0.0};
  for (double r : plan.radii) {
    for (const auto& u : dirs) {
      const Point t = r * u;
      auto [pre, res] = search_preimage(map, t, bound, inverse);
      ++targets;
      if (res > bound) ++uncovered;
      if (res >= worst) {
        worst = res;
        worst_witness = {"worst_target", t, pre, res};
      }
    }
  }
  v.metrics = {{"targets", static_cast<double>(targets)},
               {"uncovered", static_cast<double>(uncovered)},
               {"max_residual", worst}};
  v.witnesses.push_back(worst_witness);
  if (uncovered == 0) {
    v.status = Status::Confirmed;
    v.reason = "every target has a sampled preimage within the bound";
  } else {
    v.status = Status::Inconclusive;
    v.reason = "search resolution insufficient for some targets";
  }
  return v;
}

}  // namespace qilab
