#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calr_lab/scenario.hpp"

namespace calr_lab {

/// Frozen exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitPrecondition = 3;

struct RunOptions {
  int threads = 1;
  /// Replaces the source truncation degree when set.
  std::optional<int> kmax;
};

/// CSV bodies keyed by file name, plus the manifest.
struct RunArtifacts {
  std::map<std::string, std::string> csv;
  nlohmann::json manifest;
  calr::Verdict verdict = calr::Verdict::Inconclusive;
  std::vector<std::string> warnings;
};

/// Runs every requested output. Library errors other than per-point mode
/// singularities propagate (PreconditionError, DomainError).
RunArtifacts run_scenario(Scenario s, const RunOptions& opt);

/// Writes the artifacts into `dir`, creating it if needed.
void write_artifacts(const RunArtifacts& a, const std::string& dir);

struct CatalogueEntry {
  std::string name;
  std::string text;
};

/// Scenarios bundled into the binary at build time.
const std::vector<CatalogueEntry>& bundled_scenarios();

/// Full command-line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace calr_lab
