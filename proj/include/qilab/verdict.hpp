#pragma once

#include "qilab/map.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qilab {

enum class Status { Confirmed, Refuted, Inconclusive };

std::string_view to_string(Status status);

enum class CertificateKind { Analytic, Sampled, Derived };

std::string_view to_string(CertificateKind kind);

struct ProfileEntry {
  double radius = 0.0;
  double sup_ratio = 0.0;
  double inf_ratio = 0.0;
  Point argmax_direction;
};

/// r ↦ sup / inf over sampled directions of |D(x)| / |x|^exponent at |x| = r,
/// where D is the displacement (or difference) field being profiled.
struct RatioProfile {
  double exponent = 1.0;
  std::vector<ProfileEntry> entries;
};

/// A sample point (or pair) with the value that makes it interesting.
struct Witness {
  std::string label;
  Point x;
  std::optional<Point> y;
  double value = 0.0;
};

/// Three-valued outcome of a finite-sample test. Confirmed and Refuted always
/// come with a profile or witnesses; thresholds record every knob that was
/// applied.
struct Verdict {
  Status status = Status::Inconclusive;
  std::string reason;
  std::map<std::string, double> thresholds;
  std::map<std::string, double> metrics;
  std::map<std::string, std::vector<double>> series;
  std::optional<RatioProfile> profile;
  std::vector<Witness> witnesses;

  bool confirmed() const { return status == Status::Confirmed; }
  bool refuted() const { return status == Status::Refuted; }
};

}  // namespace qilab
