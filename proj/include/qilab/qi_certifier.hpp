#pragma once

// Quasi-isometry constants by structured sampling:
//   (1/K)|x - y| - C <= |f(x) - f(y)| <= K|x - y| + C.
// Sampled certificates are evidence over the plan's pairs, not proofs.

#include "qilab/map.hpp"
#include "qilab/sampling.hpp"
#include "qilab/verdict.hpp"

#include <string>
#include <vector>

namespace qilab {

struct PairWitness {
  Point x;
  Point y;
  double ratio = 0.0;  // |f(x) - f(y)| / |x - y|
};

struct QIEvidence {
  std::size_t pairs = 0;
  double max_upper_ratio = 0.0;
  double min_lower_ratio = 0.0;
  std::vector<PairWitness> witness_pairs;
};

struct QICertificate {
  double K = 1.0;
  double C = 0.0;
  CertificateKind kind = CertificateKind::Sampled;
  QIEvidence evidence;
  std::string plan_digest;
};

/// {(1 + 2^-10) * 2^(i/8)} capped at 2^10.
const std::vector<double>& k_grid();

struct SamplePair {
  Point x;
  Point y;
};

/// Per annulus: near pairs (|x - y| = r/100), antipodal pairs, and pairs
/// straddling the neighbouring annulus. Deterministic in (plan, seed).
std::vector<SamplePair> sample_pairs(const SamplingPlan& plan);

QICertificate estimate_qi_constants(const Map& map, const SamplingPlan& plan);

Verdict check_qi_inequalities(const Map& map, double K, double C, const SamplingPlan& plan);
Verdict check_qi_inequalities(const Map& map, const QICertificate& cert, const SamplingPlan& plan);

/// Looks for a preimage within `bound` of every target on the plan annuli.
/// A finite search cannot refute, so the outcome is Confirmed or Inconclusive.
Verdict check_quasi_surjectivity(const Map& map, const SamplingPlan& plan, double bound);

}  // namespace qilab
