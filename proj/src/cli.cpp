#include "qilab/cli.hpp"

#include "qilab/asymptotics.hpp"
#include "qilab/dsl.hpp"
#include "qilab/error.hpp"
#include "qilab/group_ops.hpp"
#include "qilab/qi_certifier.hpp"
#include "qilab/report.hpp"
#include "qilab/sampling.hpp"
#include "qilab/topology.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace qilab {

namespace {

const std::vector<std::string> kCommands{"certify", "membership", "coset",   "commutator", "torsion",
                                         "gadget",  "clamp",      "neighborhood", "density", "refine"};

struct Options {
  std::string command;
  std::string map, map2, plan_file, config_file, spec, spec2, out_dir;
  std::string format = "json";
  std::optional<double> alpha, epsilon, R, R0, C, tol;
  int kmax = 12;
  std::optional<std::uint64_t> seed;
};

struct Session {
  SamplingPlan plan;
  TrendRules rules;
  double H_tol = 1e-2;
  double margin = 1e-3;
  double gadget_tol = 1e-3;
  double eps_floor = 0.1;
};

struct Outcome {
  std::string status;  // Confirmed / Refuted / Inconclusive / Success
  Json result;
  std::vector<std::pair<std::string, RatioProfile>> profiles;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json read_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, "'" + path + "' is not valid JSON at byte " + std::to_string(e.byte));
  }
}

Map load_map(const std::string& path, const char* flag) {
  if (path.empty()) throw Error(ErrorCode::ConfigError, std::string("missing required ") + flag);
  return parse_map_document(read_file(path));
}

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw Error(ErrorCode::ConfigError, std::string("missing required ") + flag);
  return *v;
}

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 10);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "seed '" + text + "' is not an unsigned integer");
  }
}

double config_number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number() || !(j[key].get<double>() > 0.0)) {
    throw Error(ErrorCode::ConfigError, std::string("threshold '") + key + "' must be a positive number");
  }
  return j[key].get<double>();
}

Session make_session(Options& opt, int dimension) {
  Session s;
  Json config = Json::object();
  if (!opt.config_file.empty()) {
    config = read_json(opt.config_file);
    if (!config.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");
    if (config.contains("dimension") && config["dimension"] != dimension) {
      throw Error(ErrorCode::ConfigError, "config dimension differs from the map dimension");
    }
    if (config.contains("thresholds")) {
      const Json& t = config["thresholds"];
      s.H_tol = config_number(t, "H_tol", s.H_tol);
      s.rules.divergence_factor = config_number(t, "divergence_factor", s.rules.divergence_factor);
      s.margin = config_number(t, "neighborhood_margin", s.margin);
    }
    if (config.contains("output")) {
      const Json& o = config["output"];
      if (o.contains("format") && opt.format == "json") opt.format = o["format"].get<std::string>();
      if (o.contains("path") && opt.out_dir.empty()) opt.out_dir = o["path"].get<std::string>();
    }
  }
  if (!opt.plan_file.empty()) {
    s.plan = plan_from_json(read_json(opt.plan_file), dimension);
  } else if (config.contains("plan")) {
    s.plan = plan_from_json(config["plan"], dimension);
  } else {
    s.plan = default_plan(dimension);
  }
  if (opt.seed) s.plan.seed = *opt.seed;
  if (const char* env = std::getenv("QILAB_SEED"); env && *env) s.plan.seed = parse_seed(env);
  if (opt.tol) s.H_tol = *opt.tol;
  if (opt.format != "json" && opt.format != "csv") throw Error(ErrorCode::ConfigError, "format must be json or csv");
  return s;
}

std::string status_of(Status s) { return std::string(to_string(s)); }

std::string combine(std::initializer_list<Status> parts) {
  bool all = true;
  for (Status s : parts) {
    if (s == Status::Refuted) return "Refuted";
    all = all && s == Status::Confirmed;
  }
  return all ? "Confirmed" : "Inconclusive";
}

Outcome run(const Options& opt, const Session& s, const Map& f, const std::optional<Map>& f2) {
  Outcome o;
  const auto& cmd = opt.command;
  auto second = [&]() -> const Map& {
    if (!f2) throw Error(ErrorCode::ConfigError, "missing required --map2");
    return *f2;
  };
  if (cmd == "certify") {
    const QICertificate cert = estimate_qi_constants(f, s.plan);
    SamplingPlan check_plan = s.plan;
    check_plan.seed = s.plan.seed + 1;
    const Verdict v = check_qi_inequalities(f, cert, check_plan);
    o.status = status_of(v.status);
    o.result = {{"certificate", qi_certificate_to_json(cert)}, {"check", verdict_to_json(v)}};
  } else if (cmd == "membership") {
    if (opt.alpha) {
      const HAlphaResult r = membership_H_alpha(f, *opt.alpha, s.plan, s.rules);
      o.status = status_of(r.verdict.status);
      o.result = {{"verdict", verdict_to_json(r.verdict)}};
      o.result["certificate"] = r.certificate ? halpha_certificate_to_json(*r.certificate) : Json(nullptr);
      o.profiles.emplace_back("profile", *r.verdict.profile);
    } else {
      const Verdict v = membership_H(f, s.plan, s.H_tol, s.rules);
      o.status = status_of(v.status);
      o.result = {{"verdict", verdict_to_json(v)}};
      o.profiles.emplace_back("profile", *v.profile);
    }
  } else if (cmd == "coset") {
    const Verdict v = coset_equal_mod_H(f, second(), s.plan, s.H_tol, s.rules);
    o.status = status_of(v.status);
    o.result = {{"verdict", verdict_to_json(v)}};
    o.profiles.emplace_back("profile", *v.profile);
  } else if (cmd == "commutator") {
    const CommutationProfiles p = commutation_defect(f, second(), s.plan);
    o.status = "Success";
    o.result = {{"absolute", profile_to_json(p.absolute)}, {"relative", profile_to_json(p.relative)}};
    o.profiles.emplace_back("absolute", p.absolute);
    o.profiles.emplace_back("relative", p.relative);
  } else if (cmd == "torsion") {
    const TorsionResult r = torsion_order_mod_H(f, opt.kmax, s.plan, s.H_tol, s.rules);
    bool all_refuted = true;
    for (const auto& v : r.powers) all_refuted = all_refuted && v.refuted();
    o.status = r.order ? "Confirmed" : all_refuted ? "Refuted" : "Inconclusive";
    o.result = torsion_to_json(r);
  } else if (cmd == "gadget") {
    const WitnessResult w = build_witness_sequence(f, s.plan, opt.epsilon.value_or(s.eps_floor), s.rules);
    o.result = {{"sequence", witness_sequence_to_json(w)}};
    if (opt.alpha) {
      const double K = estimate_qi_constants(f, s.plan).K;
      const GadgetResult g = build_ball_gadget(f, w.sequence, w.epsilon, CentralizerRule{*opt.alpha, K});
      const Verdict ids = check_gadget_identities(f, g);
      const Verdict decay = check_gadget_decay(gadget_alpha_profile(g.data, *opt.alpha), s.gadget_tol, s.rules);
      o.status = combine({ids.status, decay.status});
      o.result["gadget"] = gadget_to_json(g);
      o.result["identities"] = verdict_to_json(ids);
      o.result["decay"] = verdict_to_json(decay);
      o.profiles.emplace_back("gadget_alpha_profile", *decay.profile);
    } else {
      const GadgetResult g = build_ball_gadget(f, w.sequence, w.epsilon, CenterRule{});
      const Verdict ids = check_gadget_identities(f, g);
      o.status = status_of(ids.status);
      o.result["gadget"] = gadget_to_json(g);
      o.result["identities"] = verdict_to_json(ids);
    }
  } else if (cmd == "clamp") {
    const double alpha = need(opt.alpha, "--alpha");
    const double C = need(opt.C, "--C");
    const double R0 = need(opt.R0, "--R0");
    const Map g = clamp_to_alpha(f, alpha, C, R0);
    const Verdict v = check_halpha_certificate(g, {alpha, C, R0, CertificateKind::Analytic, "clamp bound"}, s.plan);
    o.status = status_of(v.status);
    o.result = {{"map", map_document(g)}, {"bound_check", verdict_to_json(v)}};
  } else if (cmd == "neighborhood") {
    NeighborhoodSpec spec = opt.spec.empty()
                                ? NeighborhoodSpec{f, need(opt.epsilon, "--epsilon"), need(opt.R, "--R")}
                                : neighborhood_from_json(read_json(opt.spec), f.dimension());
    const Verdict v = neighborhood_contains(spec, second(), s.plan, s.margin, s.rules);
    o.status = status_of(v.status);
    o.result = {{"spec", neighborhood_to_json(spec)}, {"verdict", verdict_to_json(v)}};
    o.profiles.emplace_back("profile", *v.profile);
  } else if (cmd == "density") {
    const DensityReport r = density_witness(f, need(opt.epsilon, "--epsilon"), need(opt.R, "--R"),
                                            need(opt.alpha, "--alpha"), need(opt.C, "--C"), s.plan, s.H_tol,
                                            s.margin, s.rules);
    o.status = combine({r.claim1.status, r.claim2.status, r.claim3.status});
    o.result = density_to_json(r);
  } else if (cmd == "refine") {
    if (opt.spec.empty() || opt.spec2.empty()) throw Error(ErrorCode::ConfigError, "refine needs --spec and --spec2");
    const NeighborhoodSpec s1 = neighborhood_from_json(read_json(opt.spec), f.dimension());
    const NeighborhoodSpec s2 = neighborhood_from_json(read_json(opt.spec2), f.dimension());
    const RefineResult r = refine_intersection(s1, s2, f, s.plan, s.margin, s.rules);
    o.status = "Success";
    o.result = refine_to_json(r);
  }
  return o;
}

int exit_code_for(const std::string& status) {
  if (status == "Refuted") return kExitRefuted;
  if (status == "Inconclusive") return kExitInconclusive;
  return kExitConfirmed;
}

Json thresholds_json(const Session& s) {
  return Json{{"H_tol", s.H_tol},
              {"neighborhood_margin", s.margin},
              {"gadget_tol", s.gadget_tol},
              {"noise_floor", s.rules.noise_floor},
              {"monotone_rel", s.rules.monotone_rel},
              {"tail_fraction", s.rules.tail_fraction},
              {"divergence_factor", s.rules.divergence_factor},
              {"divergence_decades", s.rules.divergence_decades},
              {"k_inflation", s.rules.k_inflation}};
}

Json options_json(const Options& opt) {
  Json j{{"command", opt.command}, {"kmax", opt.kmax}, {"format", opt.format}};
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) j[k] = *v;
  };
  put("alpha", opt.alpha);
  put("epsilon", opt.epsilon);
  put("R", opt.R);
  put("R0", opt.R0);
  put("C", opt.C);
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path.string() + "'");
  out << text;
}

// A neighbourhood spec carries its own centre, so --map may be left out there.
Map primary_map(const Options& opt) {
  if (opt.map.empty() && opt.command == "neighborhood" && !opt.spec.empty()) {
    const Json j = read_json(opt.spec);
    if (!j.is_object() || !j.contains("dimension") || !j["dimension"].is_number_integer()) {
      throw Error(ErrorCode::ConfigError, "a spec used without --map needs an integer \"dimension\"");
    }
    return neighborhood_from_json(j, j["dimension"].get<int>()).center;
  }
  return load_map(opt.map, "--map");
}

int execute(Options& opt, std::ostream& out) {
  const Map f = primary_map(opt);
  std::optional<Map> f2;
  if (!opt.map2.empty()) f2 = load_map(opt.map2, "--map2");
  if (f2 && f2->dimension() != f.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "--map and --map2 have different dimensions");
  }
  const Session session = make_session(opt, f.dimension());
  const Outcome outcome = run(opt, session, f, f2);

  Json maps{{"map", {{"digest", map_digest(f)}, {"document", map_document(f)}}}};
  if (f2) maps["map2"] = {{"digest", map_digest(*f2)}, {"document", map_document(*f2)}};
  Json config{{"options", options_json(opt)},
              {"plan", plan_to_json(session.plan)},
              {"thresholds", thresholds_json(session)}};
  if (!opt.spec.empty()) config["spec"] = read_json(opt.spec);
  if (!opt.spec2.empty()) config["spec2"] = read_json(opt.spec2);
  Json report{{"tool", "qilab"},
              {"tool_version", QILAB_VERSION},
              {"command", opt.command},
              {"config_digest", digest_hex(config.dump())},
              {"maps", maps},
              {"plan", plan_to_json(session.plan)},
              {"plan_digest", plan_digest(session.plan)},
              {"seed", session.plan.seed},
              {"thresholds", thresholds_json(session)},
              {"status", outcome.status},
              {"result", outcome.result}};

  const std::string text = dump_report(report);
  if (!opt.out_dir.empty()) {
    const std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / (opt.command + "_report.json"), text);
    if (opt.format == "csv") {
      for (const auto& [name, p] : outcome.profiles) write_file(dir / (opt.command + "_" + name + ".csv"), profile_to_csv(p));
    }
  } else if (opt.format == "csv") {
    for (const auto& [name, p] : outcome.profiles) out << "# " << name << '\n' << profile_to_csv(p);
  } else {
    out << text;
  }
  return exit_code_for(outcome.status);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Quasi-isometry experiments on R^n"};
  app.name(args.empty() ? "qilab" : args.front());
  app.add_option("command", opt.command, "Operation to run")->required()->check(CLI::IsMember(kCommands));
  app.add_option("--map", opt.map, "Map document (JSON DSL)");
  app.add_option("--map2", opt.map2, "Second map document");
  app.add_option("--alpha", opt.alpha, "Exponent in (0, 1)");
  app.add_option("--epsilon", opt.epsilon, "Neighborhood radius or witness floor");
  app.add_option("--R", opt.R, "Neighborhood base radius");
  app.add_option("--R0", opt.R0, "Clamp radius");
  app.add_option("--C", opt.C, "Clamp constant");
  app.add_option("--tol", opt.tol, "Tolerance for H-membership and coset tests");
  app.add_option("--kmax", opt.kmax, "Largest power tried by torsion")->check(CLI::PositiveNumber);
  app.add_option("--plan", opt.plan_file, "Sampling plan (JSON)");
  app.add_option("--config", opt.config_file, "Session config (JSON)");
  app.add_option("--spec", opt.spec, "Neighborhood spec (JSON)");
  app.add_option("--spec2", opt.spec2, "Second neighborhood spec (JSON)");
  app.add_option("--seed", opt.seed, "Seed; QILAB_SEED overrides it");
  app.add_option("--out", opt.out_dir, "Directory for report files");
  app.add_option("--format", opt.format, "json or csv");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitConfirmed;
  } catch (const CLI::ParseError& e) {
    err << "ConfigError: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    return execute(opt, out);
  } catch (const Error& e) {
    err << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ParseError:
        return kExitParseError;
      case ErrorCode::ConfigError:
        return kExitConfigError;
      default:
        return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace qilab
