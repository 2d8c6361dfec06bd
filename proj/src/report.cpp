#include "qilab/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace qilab {

namespace {

// JSON has no infinities; they are spelled out so reports stay parseable.
Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json numbers(const std::vector<double>& vs) {
  Json a = Json::array();
  for (double v : vs) a.push_back(number(v));
  return a;
}

Json number_map(const std::map<std::string, double>& m) {
  Json o = Json::object();
  for (const auto& [k, v] : m) o[k] = number(v);
  return o;
}

Json witness_to_json(const Witness& w) {
  Json j{{"label", w.label}, {"x", point_to_json(w.x)}, {"value", number(w.value)}};
  if (w.y) j["y"] = point_to_json(*w.y);
  return j;
}

}  // namespace

Json profile_to_json(const RatioProfile& profile) {
  Json entries = Json::array();
  for (const auto& e : profile.entries) {
    entries.push_back({{"radius", number(e.radius)},
                       {"sup_ratio", number(e.sup_ratio)},
                       {"inf_ratio", number(e.inf_ratio)},
                       {"argmax_direction", point_to_json(e.argmax_direction)}});
  }
  return Json{{"exponent", profile.exponent}, {"entries", entries}};
}

std::string profile_to_csv(const RatioProfile& profile) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "radius,sup_ratio,inf_ratio\n";
  for (const auto& e : profile.entries) os << e.radius << ',' << e.sup_ratio << ',' << e.inf_ratio << '\n';
  return os.str();
}

Json verdict_to_json(const Verdict& v) {
  Json j{{"status", std::string(to_string(v.status))},
         {"reason", v.reason},
         {"thresholds", number_map(v.thresholds)},
         {"metrics", number_map(v.metrics)}};
  Json series = Json::object();
  for (const auto& [k, s] : v.series) series[k] = numbers(s);
  j["series"] = series;
  if (v.profile) j["profile"] = profile_to_json(*v.profile);
  Json ws = Json::array();
  for (const auto& w : v.witnesses) ws.push_back(witness_to_json(w));
  j["witnesses"] = ws;
  return j;
}

Json qi_certificate_to_json(const QICertificate& c) {
  Json pairs = Json::array();
  for (const auto& p : c.evidence.witness_pairs) {
    pairs.push_back({{"x", point_to_json(p.x)}, {"y", point_to_json(p.y)}, {"ratio", number(p.ratio)}});
  }
  return Json{{"K", number(c.K)},
              {"C", number(c.C)},
              {"kind", std::string(to_string(c.kind))},
              {"plan_digest", c.plan_digest},
              {"evidence",
               {{"pairs", c.evidence.pairs},
                {"max_upper_ratio", number(c.evidence.max_upper_ratio)},
                {"min_lower_ratio", number(c.evidence.min_lower_ratio)},
                {"witness_pairs", pairs}}}};
}

Json halpha_certificate_to_json(const HAlphaCertificate& c) {
  return Json{{"alpha", c.alpha},
              {"K", number(c.K)},
              {"R", number(c.R)},
              {"kind", std::string(to_string(c.kind))},
              {"provenance", c.provenance}};
}

Json torsion_to_json(const TorsionResult& r) {
  Json powers = Json::array();
  for (const auto& v : r.powers) powers.push_back(verdict_to_json(v));
  Json j{{"reason", r.reason}, {"powers", powers}};
  j["order"] = r.order ? Json(*r.order) : Json(nullptr);
  return j;
}

Json witness_sequence_to_json(const WitnessResult& r) {
  Json pts = Json::array();
  for (const auto& p : r.sequence.points) pts.push_back(point_to_json(p));
  return Json{{"points", pts},
              {"description", r.sequence.description},
              {"epsilon", number(r.epsilon)},
              {"membership", verdict_to_json(r.membership)}};
}

Json gadget_to_json(const GadgetResult& g) {
  Json ws = Json::array();
  for (const auto& p : g.witnesses) ws.push_back(point_to_json(p));
  return Json{{"map", map_document(g.gadget)},
              {"witnesses", ws},
              {"epsilon", number(g.epsilon)},
              {"halvings", g.halvings},
              {"provenance", g.data.provenance}};
}

Json density_to_json(const DensityReport& r) {
  return Json{{"R0", number(r.R0)},
              {"g", map_document(r.g)},
              {"f_qi", qi_certificate_to_json(r.qi_f)},
              {"derived_K", number(r.derived_K)},
              {"derived_C", number(r.derived_C)},
              {"membership", verdict_to_json(r.membership)},
              {"claim1", verdict_to_json(r.claim1)},
              {"claim2", verdict_to_json(r.claim2)},
              {"claim3", verdict_to_json(r.claim3)}};
}

Json refine_to_json(const RefineResult& r) {
  return Json{{"spec", neighborhood_to_json(r.spec)},
              {"A1", number(r.A1)},
              {"A2", number(r.A2)},
              {"contains1", verdict_to_json(r.contains1)},
              {"contains2", verdict_to_json(r.contains2)}};
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace qilab
