#include "support.hpp"

#include "qilab/cli.hpp"
#include "qilab/dsl.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qilab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qilab");
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string example(const std::string& name) { return std::string(QILAB_EXAMPLES_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qilab_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("membership in H_alpha for log drift") {
  const Run r = run({"membership", "--map", example("logdrift.json"), "--alpha", "0.5"});
  CHECK(r.code == kExitConfirmed);
  const Json j = Json::parse(r.out);
  CHECK(j["status"] == "Confirmed");
  CHECK(j["command"] == "membership");
  CHECK(j["tool"] == "qilab");
  CHECK(j["tool_version"] == QILAB_VERSION);
  CHECK(j["config_digest"].get<std::string>().size() == 16);
  CHECK(j["result"]["certificate"]["alpha"] == 0.5);
  CHECK(j["thresholds"].contains("divergence_factor"));
  const Map f = parse_map_document(slurp(example("logdrift.json")));
  CHECK(j["maps"]["map"]["digest"] == map_digest(f));
}

TEST_CASE("torsion of the order-three rotation") {
  const Run r = run({"torsion", "--map", example("rot3.json"), "--kmax", "10"});
  CHECK(r.code == kExitConfirmed);
  CHECK(Json::parse(r.out)["result"]["order"] == 3);
}

TEST_CASE("verdicts map onto exit codes") {
  CHECK(run({"membership", "--map", example("identity.json")}).code == kExitConfirmed);
  CHECK(run({"membership", "--map", example("dilation2.json")}).code == kExitRefuted);
  CHECK(run({"membership", "--map", example("linear_over_log.json"), "--alpha", "0.5"}).code == kExitRefuted);
  CHECK(run({"coset", "--map", example("dilation2.json"), "--map2", example("dilation2.json")}).code ==
        kExitConfirmed);
  CHECK(run({"commutator", "--map", example("dilation2.json"), "--map2", example("rot3.json")}).code ==
        kExitConfirmed);
  CHECK(run({"neighborhood", "--spec", example("nbhd_identity.json"), "--map2", example("logdrift.json")}).code ==
        kExitConfirmed);
  CHECK(run({"certify", "--map", example("dilation2.json")}).code == kExitConfirmed);
}

TEST_CASE("malformed DSL exits with the parse code and a position") {
  const fs::path dir = scratch("parse");
  const std::string bad = write(dir / "bad.json", R"({"dimension": 3, "map": {"op": )");
  const Run r = run({"membership", "--map", bad});
  CHECK(r.code == kExitParseError);
  CHECK(r.err.find("ParseError") != std::string::npos);
  CHECK(r.err.find("byte") != std::string::npos);

  const std::string unknown = write(dir / "unknown.json", R"({"dimension": 3, "map": {"op": "shear"}})");
  const Run u = run({"membership", "--map", unknown});
  CHECK(u.code == kExitParseError);
  CHECK(u.err.find("/map") != std::string::npos);
}

TEST_CASE("configuration problems exit with the config code") {
  CHECK(run({"membership"}).code == kExitConfigError);
  CHECK(run({"explode", "--map", example("identity.json")}).code == kExitConfigError);
  CHECK(run({"membership", "--map", example("identity.json"), "--format", "xml"}).code == kExitConfigError);
  CHECK(run({"membership", "--map", example("identity.json"), "--alpha", "half"}).code == kExitConfigError);
  CHECK(run({"membership", "--map", "/nonexistent/map.json"}).code == kExitConfigError);

  const fs::path dir = scratch("config");
  const std::string broken = write(dir / "broken.json", "{ not json");
  CHECK(run({"membership", "--map", example("identity.json"), "--config", broken}).code == kExitConfigError);
  const std::string negative = write(dir / "neg.json", R"({"thresholds": {"H_tol": -1}})");
  CHECK(run({"membership", "--map", example("identity.json"), "--config", negative}).code == kExitConfigError);
  const std::string short_plan = write(dir / "plan.json", R"({"radii": [10, 5]})");
  CHECK(run({"membership", "--map", example("identity.json"), "--plan", short_plan}).code == kExitConfigError);
}

TEST_CASE("library errors exit with the failure code") {
  const Run r = run({"membership", "--map", example("logdrift.json"), "--alpha", "1.5"});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("AlphaOutOfRange") != std::string::npos);
}

TEST_CASE("config thresholds and plan reach the report") {
  const fs::path dir = scratch("thresholds");
  const std::string cfg = write(
      dir / "cfg.json",
      R"({"plan": {"r_min": 10, "ratio": 10, "annuli": 6, "seed": 5}, "thresholds": {"H_tol": 0.05}})");
  const Run r = run({"membership", "--map", example("identity.json"), "--config", cfg});
  REQUIRE(r.code == kExitConfirmed);
  const Json j = Json::parse(r.out);
  CHECK(j["seed"] == 5);
  CHECK(j["plan"]["radii"].size() == 6);
  CHECK(j["thresholds"]["H_tol"] == 0.05);
}

TEST_CASE("QILAB_SEED overrides --seed") {
  const auto seed_of = [](const Run& r) { return Json::parse(r.out)["seed"].get<std::uint64_t>(); };
  ::unsetenv("QILAB_SEED");
  CHECK(seed_of(run({"membership", "--map", example("identity.json"), "--seed", "17"})) == 17);
  ::setenv("QILAB_SEED", "4242", 1);
  CHECK(seed_of(run({"membership", "--map", example("identity.json"), "--seed", "17"})) == 4242);
  ::setenv("QILAB_SEED", "many", 1);
  CHECK(run({"membership", "--map", example("identity.json")}).code == kExitConfigError);
  ::unsetenv("QILAB_SEED");
}

TEST_CASE("reports are byte-identical across runs") {
  const std::vector<std::string> args{"gadget", "--map", example("reflection.json"), "--epsilon", "0.5"};
  const Run a = run(args);
  const Run b = run(args);
  CHECK(a.code == kExitConfirmed);
  CHECK(a.out == b.out);

  const Run c = run({"membership", "--map", example("identity.json"), "--seed", "1"});
  const Run d = run({"membership", "--map", example("identity.json"), "--seed", "2"});
  CHECK(c.out != d.out);
}

TEST_CASE("--out writes report files, with CSV profiles on request") {
  const fs::path dir = scratch("out");
  const Run r = run({"membership", "--map", example("linear_over_log.json"), "--out", dir.string(), "--format", "csv"});
  CHECK(r.code == kExitConfirmed);
  CHECK(r.out.empty());
  REQUIRE(fs::exists(dir / "membership_report.json"));
  CHECK(Json::parse(slurp(dir / "membership_report.json"))["status"] == "Confirmed");
  bool csv = false;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") {
      csv = true;
      CHECK(slurp(entry.path()).rfind("radius,", 0) == 0);
    }
  }
  CHECK(csv);

  const Run s = run({"membership", "--map", example("identity.json"), "--format", "csv"});
  CHECK(s.out.rfind("# ", 0) == 0);
}
