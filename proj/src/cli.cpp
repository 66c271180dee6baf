#include "pruw/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pruw/audit.hpp"
#include "pruw/hetero_planner.hpp"
#include "pruw/homo_planner.hpp"
#include "pruw/simulator.hpp"

namespace pruw {

namespace {

using nlohmann::json;

constexpr std::size_t kMaxAutoL = 10'000'000;

std::string both(const Rational& v) { return to_fraction_string(v) + " (" + to_decimal_string(v) + ")"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidInput, "cannot write " + path);
  out << text;
}

json ledger_json(const CostLedger& l) {
  return {{"downloaded", l.downloaded},
          {"uploaded", l.uploaded},
          {"useful_read", l.useful_read},
          {"useful_write", l.useful_write}};
}

json comparison_json(const CostComparison& c) {
  return {{"label", c.label},
          {"measured", {{"read", to_fraction_string(c.measured_read)},
                        {"write", to_fraction_string(c.measured_write)},
                        {"total", to_fraction_string(c.measured_total)},
                        {"total_decimal", to_decimal_string(c.measured_total)}}},
          {"predicted", {{"read", to_fraction_string(c.predicted_read)},
                         {"write", to_fraction_string(c.predicted_write)},
                         {"total", to_fraction_string(c.predicted_total)},
                         {"total_decimal", to_decimal_string(c.predicted_total)}}},
          {"equal", c.equal}};
}

int plan_hetero_cmd(const std::vector<std::string>& mu_tokens, const std::string& mu_file, bool paper_rounded,
                    const std::string& force_code, const std::string& out_path, std::uint64_t seed,
                    std::ostream& out) {
  std::vector<std::string> tokens = mu_tokens;
  if (!mu_file.empty()) {
    std::istringstream in(read_file(mu_file));
    for (std::string t; in >> t;) tokens.push_back(t);
  }
  const auto mu = parse_mu_list(tokens);
  StoragePlan plan;
  if (!force_code.empty()) {
    const auto comma = force_code.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::kInvalidInput, "--force-code expects K,R");
    const auto K = static_cast<std::size_t>(to_int64(parse_rational(force_code.substr(0, comma))));
    const auto R = static_cast<std::size_t>(to_int64(parse_rational(force_code.substr(comma + 1))));
    plan = plan_single_code(mu, K, R, seed);
    out << "forced code (K=" << K << ", R=" << R << ")\n";
  } else {
    const auto res = plan_hetero_detailed(mu, HeteroOptions{paper_rounded, seed});
    plan = res.plan;
    out << "k = " << both(res.params.k) << "\np = " << both(res.params.p) << "\nr = " << both(res.params.r)
        << "\ns = " << both(res.params.s) << "\n";
    out << "C1 = " << (res.c1 ? both(res.c1->cost) : "unavailable: " + res.c1_note) << "\n";
    out << "C2 = " << (res.c2 ? both(res.c2->cost) : "unavailable: " + res.c2_note) << "\n";
    if (res.c2) {
      out << "alpha = " << to_fraction_string(res.c2->alpha) << ", beta = " << to_fraction_string(res.c2->beta)
          << ", delta = " << to_fraction_string(res.c2->delta) << "\n";
    }
    out << "branch = " << plan.branch << "\n";
  }
  for (const auto& seg : plan.segments) {
    out << "segment " << seg.label << ": code (K=" << seg.code.K << ", R=" << seg.code.R
        << "), fraction " << both(seg.fraction) << ", " << seg.partition.size() << " subsets\n";
  }
  out << "predicted cost = " << both(plan.predicted_cost) << "\n";
  const auto text = plan_to_json(plan);
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int plan_homo_cmd(std::size_t N, const std::string& mu_text, const std::string& out_path,
                  const std::string& curve_path, std::uint64_t seed, std::ostream& out) {
  if (mu_text.empty() && curve_path.empty()) {
    throw Error(ErrorCode::kInvalidInput, "give --mu, --curve or both");
  }
  if (!curve_path.empty()) {
    const auto rows = cost_curves(N);
    write_file(curve_path, curves_to_csv(rows));
    out << "wrote " << rows.size() << " curve rows to " << curve_path << "\n";
    for (const auto& v : lower_hull(basic_pairs(N))) {
      out << "hull vertex (R=" << v.R << ", K=" << v.K << ") mu=" << both(v.mu) << " cost=" << both(v.cost) << "\n";
    }
  }
  if (mu_text.empty()) return kExitOk;
  const auto homo = plan_homo(N, parse_rational(mu_text));
  const auto plan = to_storage_plan(homo, seed);
  out << "gamma = " << both(homo.gamma) << "\n";
  out << "lo = (R=" << homo.lo.R << ", K=" << homo.lo.K << ") cost " << both(homo.lo.cost) << "\n";
  out << "hi = (R=" << homo.hi.R << ", K=" << homo.hi.K << ") cost " << both(homo.hi.cost) << "\n";
  out << "predicted cost = " << both(homo.cost) << "\n";
  const auto text = plan_to_json(plan);
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int simulate_cmd(const std::string& plan_path, std::size_t M, const std::string& l_text, std::size_t rounds,
                 std::uint64_t seed, const std::string& transcript_dir, bool debug_theta, std::ostream& out) {
  const auto plan = plan_from_json(read_file(plan_path));
  const BigInt min_l = minimal_L(plan);
  std::size_t L = 0;
  if (l_text == "auto") {
    if (min_l > kMaxAutoL) {
      throw Error(ErrorCode::kInvalidInput, "minimal L=" + min_l.str() + " is too large to simulate");
    }
    L = static_cast<std::size_t>(min_l);
  } else {
    L = static_cast<std::size_t>(to_int64(parse_rational(l_text)));
  }
  auto sys = init_system(plan, M, L, seed);
  const auto occupancy = occupancy_violations(sys);

  std::ofstream frames;
  Transcript transcript;
  transcript.debug_theta = debug_theta;
  if (!transcript_dir.empty()) {
    std::filesystem::create_directories(transcript_dir);
    frames.open(std::filesystem::path(transcript_dir) / "frames.bin", std::ios::binary);
    if (!frames) throw Error(ErrorCode::kInvalidInput, "cannot write transcript to " + transcript_dir);
    transcript.frames = &frames;
  }
  const auto report = measure_vs_theory(sys, rounds, &transcript);

  json summary;
  summary["plan_kind"] = plan_kind_name(plan.kind);
  summary["M"] = M;
  summary["L"] = L;
  summary["L_min"] = min_l.str();
  summary["rounds"] = rounds;
  summary["seed"] = seed;
  summary["occupancy_ok"] = occupancy.empty();
  summary["mismatches"] = report.mismatches;
  json segments = json::array();
  for (const auto& c : report.segments) segments.push_back(comparison_json(c));
  summary["segments"] = segments;
  summary["blended"] = comparison_json(report.blended);
  summary["costs_equal"] = report.all_equal;
  const bool ok = report.all_equal && occupancy.empty();
  summary["ok"] = ok;

  if (!transcript_dir.empty()) {
    json rounds_json = json::array();
    for (const auto& r : transcript.rounds) {
      json row = {{"round", r.round},     {"theta_hash", r.theta_hash}, {"read", ledger_json(r.read)},
                  {"write", ledger_json(r.write)}, {"read_ok", r.read_ok},   {"write_ok", r.write_ok}};
      if (r.theta) row["theta"] = *r.theta;
      rounds_json.push_back(row);
    }
    write_file((std::filesystem::path(transcript_dir) / "rounds.json").string(), rounds_json.dump(2) + "\n");
  }
  out << summary.dump(2) << "\n";
  return ok ? kExitOk : kExitInvariant;
}

int audit_cmd(std::uint64_t q, std::size_t M, bool negative_control, std::ostream& out) {
  const auto rep = audit_privacy(q, M, negative_control);
  json cases = json::array();
  for (const auto& c : rep.cases) {
    cases.push_back({{"kind", c.kind},
                     {"description", c.description},
                     {"code", {{"K", c.code.K}, {"R", c.code.R}, {"x", c.code.x}, {"y", c.code.y}}},
                     {"db", c.db + 1},
                     {"lane", c.lane + 1},
                     {"points", c.points},
                     {"tv", to_fraction_string(c.tv)}});
  }
  json report = {{"q", rep.q},
                 {"M", rep.M},
                 {"negative_control", rep.negative_control},
                 {"cases", cases},
                 {"max_tv", to_fraction_string(rep.max_tv)},
                 {"ok", rep.all_zero()}};
  out << report.dump(2) << "\n";
  return rep.all_zero() ? kExitOk : kExitPrivacy;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvariantViolation:
    case ErrorCode::kSingularSystem:
      return kExitInvariant;
    default:
      return kExitInput;
  }
}

std::vector<Rational> parse_mu_list(const std::vector<std::string>& tokens) {
  std::vector<Rational> out;
  for (const auto& raw : tokens) {
    std::stringstream parts(raw);
    for (std::string token; std::getline(parts, token, ',');) {
      if (token.empty()) continue;
      std::size_t count = 1;
      std::string value = token;
      std::size_t pos = token.find("\xC3\x97");  // multiplication sign
      std::size_t skip = 2;
      if (pos == std::string::npos) {
        pos = token.find_first_of("xX*");
        skip = 1;
      }
      if (pos != std::string::npos) {
        value = token.substr(0, pos);
        const Rational c = parse_rational(token.substr(pos + skip));
        if (!is_integer(c) || c < 1) throw Error(ErrorCode::kInvalidInput, "bad repeat count in " + token);
        count = static_cast<std::size_t>(to_int64(c));
      }
      const Rational v = parse_rational(value);
      out.insert(out.end(), count, v);
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidInput, "no storage constraints given");
  return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Private read-update-write planner and simulator", "pruw"};
  app.require_subcommand(1);

  std::vector<std::string> mu_tokens;
  std::string mu_file;
  bool paper_rounded = false;
  std::string force_code;
  std::string hetero_out;
  std::uint64_t hetero_seed = 1;
  auto* hetero = app.add_subcommand("plan-hetero", "Plan storage for unequal constraints");
  hetero->add_option("--mu", mu_tokens, "Constraints, e.g. 0.37x5 0.35x7");
  hetero->add_option("--mu-file", mu_file, "File with whitespace separated constraints");
  hetero->add_flag("--paper-rounded", paper_rounded, "Truncate k to one decimal");
  hetero->add_option("--force-code", force_code, "Use a single K,R code");
  hetero->add_option("--out", hetero_out, "Plan JSON path (stdout if omitted)");
  hetero->add_option("--seed", hetero_seed, "Evaluation-constant seed");

  std::size_t homo_n = 0;
  std::string homo_mu;
  std::string homo_out;
  std::string curve;
  std::uint64_t homo_seed = 1;
  auto* homo = app.add_subcommand("plan-homo", "Plan storage for a common constraint");
  homo->add_option("--n", homo_n, "Number of databases")->required();
  homo->add_option("--mu", homo_mu, "Common constraint");
  homo->add_option("--out", homo_out, "Plan JSON path (stdout if omitted)");
  homo->add_option("--curve", curve, "Write hybrid/divided/coded cost curves as CSV");
  homo->add_option("--seed", homo_seed, "Evaluation-constant seed");

  std::string plan_path;
  std::size_t sim_m = 2;
  std::string sim_l = "auto";
  std::size_t rounds = 10;
  std::uint64_t sim_seed = 1;
  std::string transcript_dir;
  bool debug_theta = false;
  auto* sim = app.add_subcommand("simulate", "Run read/write rounds over a plan");
  sim->add_option("--plan", plan_path, "Plan JSON")->required();
  sim->add_option("--m", sim_m, "Number of submodels");
  sim->add_option("--l", sim_l, "Parameters per submodel, or auto");
  sim->add_option("--rounds", rounds, "Read/write rounds");
  sim->add_option("--seed", sim_seed, "Scenario seed");
  sim->add_option("--transcript", transcript_dir, "Directory for frames.bin and rounds.json");
  sim->add_flag("--debug-theta", debug_theta, "Record theta in rounds.json");

  std::uint64_t audit_q = kAuditPrime;
  std::size_t audit_m = 2;
  bool negative_control = false;
  auto* aud = app.add_subcommand("audit", "Exhaustive privacy and security audit");
  aud->add_option("--q", audit_q, "Prime field size");
  aud->add_option("--m", audit_m, "Number of submodels");
  aud->add_flag("--negative-control", negative_control, "Drop every noise term");

  std::vector<std::string> argv_store{"pruw"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*hetero) {
      return plan_hetero_cmd(mu_tokens, mu_file, paper_rounded, force_code, hetero_out, hetero_seed, out);
    }
    if (*homo) return plan_homo_cmd(homo_n, homo_mu, homo_out, curve, homo_seed, out);
    if (*sim) return simulate_cmd(plan_path, sim_m, sim_l, rounds, sim_seed, transcript_dir, debug_theta, out);
    if (*aud) return audit_cmd(audit_q, audit_m, negative_control, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::kDegenerateHomogeneous) err << "hint: use plan-homo for equal constraints\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace pruw
