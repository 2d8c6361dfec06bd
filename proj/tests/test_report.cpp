#include "support.hpp"

#include "qilab/report.hpp"

#include <limits>

using namespace qilab;

TEST_CASE("non-finite numbers stay parseable") {
  Verdict v;
  v.status = Status::Refuted;
  v.metrics = {{"big", std::numeric_limits<double>::infinity()}, {"odd", std::nan("")}, {"plain", 0.5}};
  const Json j = Json::parse(dump_report(verdict_to_json(v)));
  CHECK(j["status"] == "Refuted");
  CHECK(j["metrics"]["big"] == "inf");
  CHECK(j["metrics"]["odd"] == "nan");
  CHECK(j["metrics"]["plain"] == 0.5);
}

TEST_CASE("profiles as CSV and JSON") {
  RatioProfile p;
  p.exponent = 0.5;
  p.entries.push_back({100.0, 0.25, 0.125, basis_vector(2, 0)});
  p.entries.push_back({1000.0, 0.1, 0.05, basis_vector(2, 1)});
  CHECK(profile_to_csv(p) == "radius,sup_ratio,inf_ratio\n100,0.25,0.125\n1000,0.10000000000000001,0.050000000000000003\n");
  const Json j = profile_to_json(p);
  CHECK(j["exponent"] == 0.5);
  CHECK(j["entries"][1]["argmax_direction"] == Json::array({0.0, 1.0}));
}

TEST_CASE("dumps are key-sorted with a trailing newline") {
  const std::string text = dump_report(Json{{"zeta", 1}, {"alpha", 2}});
  CHECK(text == "{\n  \"alpha\": 2,\n  \"zeta\": 1\n}\n");
}

TEST_CASE("certificates carry their provenance") {
  HAlphaCertificate c;
  c.alpha = 0.25;
  c.K = 3.0;
  c.R = 10.0;
  c.kind = CertificateKind::Derived;
  c.provenance = "sum rule";
  const Json j = halpha_certificate_to_json(c);
  CHECK(j["kind"] == "Derived");
  CHECK(j["provenance"] == "sum rule");
  CHECK(j["K"] == 3.0);
}
