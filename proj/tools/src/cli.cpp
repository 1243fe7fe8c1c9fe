#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "calr_lab/runner.hpp"

namespace calr_lab {

using nlohmann::json;

namespace {

Scenario resolve(const std::string& ref) {
  if (std::filesystem::exists(ref)) return load_scenario(ref);
  for (const auto& e : bundled_scenarios()) {
    if (e.name == ref) return parse_scenario(e.text);
  }
  throw ScenarioError("", "'" + ref + "' is neither a readable file nor a bundled scenario (see 'calr_lab list')");
}

// --threads wins over CALR_LAB_THREADS; default 1.
int thread_count(const std::optional<int>& flag) {
  if (flag) {
    if (*flag < 1) throw ScenarioError("--threads", "must be >= 1");
    return *flag;
  }
  const char* env = std::getenv("CALR_LAB_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 1024) throw ScenarioError("CALR_LAB_THREADS", "expected a positive integer");
  return static_cast<int>(n);
}

void list(std::ostream& out, bool as_json) {
  if (as_json) {
    json all = json::array();
    for (const auto& e : bundled_scenarios()) {
      const Scenario s = parse_scenario(e.text);
      all.push_back({{"name", s.name},
                     {"theorem", s.theorem},
                     {"expected_verdict", calr::to_string(s.expected_verdict)},
                     {"scenario", s.document}});
    }
    out << all.dump(2) << '\n';
    return;
  }
  for (const auto& e : bundled_scenarios()) {
    const Scenario s = parse_scenario(e.text);
    out << s.name << "  theorem " << (s.theorem.empty() ? "-" : s.theorem) << "  expect "
        << calr::to_string(s.expected_verdict) << "  " << s.description << '\n';
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"calr_lab: loss-driven resonance sweeps for layered spheres"};
  app.require_subcommand(1);

  std::string scenario_ref;
  std::string out_dir = "calr_out";
  std::optional<int> threads;
  std::optional<int> kmax;
  std::optional<long> seed;
  auto* run = app.add_subcommand("run", "run a scenario file or bundled scenario");
  run->add_option("scenario", scenario_ref, "scenario file or bundled name")->required();
  run->add_option("--out", out_dir, "output directory")->capture_default_str();
  run->add_option("--threads", threads, "worker threads (fallback: CALR_LAB_THREADS)");
  run->add_option("--kmax", kmax, "override the source truncation degree");
  run->add_option("--seed", seed, "reserved; all computation is deterministic");

  bool as_json = false;
  auto* ls = app.add_subcommand("list", "list bundled scenarios");
  ls->add_flag("--json", as_json, "machine-readable output");

  std::string check_ref;
  auto* check = app.add_subcommand("check", "validate a scenario without running it");
  check->add_option("scenario", check_ref, "scenario file or bundled name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*ls) {
      list(out, as_json);
      return kExitOk;
    }
    if (*check) {
      const Scenario s = resolve(check_ref);
      check_preconditions(s);
      out << "ok: " << s.name << " (" << build_etas(s).size() << " eta points)\n";
      return kExitOk;
    }
    RunOptions opt;
    opt.threads = thread_count(threads);
    opt.kmax = kmax;
    const Scenario s = resolve(scenario_ref);
    const RunArtifacts a = run_scenario(s, opt);
    write_artifacts(a, out_dir);
    out << s.name << ": verdict " << calr::to_string(a.verdict) << " (expected "
        << calr::to_string(s.expected_verdict) << ")\n";
    for (const auto& [file, body] : a.csv) out << "  wrote " << (std::filesystem::path(out_dir) / file).string() << '\n';
    if (!a.warnings.empty()) {
      err << "warnings:\n";
      for (const auto& w : a.warnings) err << "  " << w << '\n';
    }
    return kExitOk;
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const calr::PreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const calr::DomainError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  }
}

}  // namespace calr_lab
