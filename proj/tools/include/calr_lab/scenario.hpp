#pragma once

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <calr/calr.hpp>

namespace calr_lab {

/// Malformed scenario document. `field` is a dotted path ("eta_grid.start"),
/// `line` is set for syntax errors only.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message, std::optional<int> line = std::nullopt);
  [[nodiscard]] const std::string& field() const { return field_; }
  [[nodiscard]] std::optional<int> line() const { return line_; }

 private:
  std::string field_;
  std::optional<int> line_;
};

enum class Materials { Standard, Coreless, AdaptiveShell, FixedShell, Given };

enum class CoefficientRule { Geometric, Constant, Single, Explicit };

struct ExplicitCoefficient {
  calr::ModeIndex mode;
  calr::cdouble value;
};

struct SourceDecl {
  calr::SourceKind kind = calr::SourceKind::Multipole;
  double q = 2.5;
  CoefficientRule rule = CoefficientRule::Geometric;
  int k_max = calr::kDefaultKMax;
  // geometric: amplitude * scale^{-k} on l = 0
  double scale = 2.5;
  double amplitude = 1.0;
  // constant and single
  calr::cdouble value{1.0, 0.0};
  calr::ModeIndex single{1, 0};
  std::vector<ExplicitCoefficient> coefficients;
};

enum class EtaRule { BandCentered, Geometric, Decades, List };

struct EtaGridDecl {
  EtaRule rule = EtaRule::Decades;
  double start = 1e-1;
  double stop = 1e-8;
  int count = 0;
  int j_first = 0;
  int j_last = 0;
  /// Band base for band_centered; defaults to the base of the coupling rule.
  std::optional<double> base;
  /// list: strictly decreasing, eta = 0 allowed for lossless runs.
  std::vector<double> values;
};

enum class Output { EnergySweep, Bounds, FieldProfile, CalrDiagnostic };

enum class BoundsFamily { PrimalNR1, DualR1, DualR2, CrcFixed, CrcAdaptive };

struct BoundsDecl {
  BoundsFamily family = BoundsFamily::PrimalNR1;
  /// Fixed multiplier for the dual families; default is the optimal one.
  std::optional<double> lambda;
};

struct Scenario {
  std::string name;
  std::string theorem;
  calr::Verdict expected_verdict = calr::Verdict::Inconclusive;
  std::string description;
  double r_i = 1.0;
  double r_e = 2.0;
  Materials materials = Materials::Standard;
  int k0 = 1;
  calr::cdouble eps_core{1.0, 0.0};
  calr::cdouble eps_shell{1.0, 0.0};
  calr::cdouble eps_matrix{1.0, 0.0};
  calr::LossRegion loss_region = calr::LossRegion::Shell;
  SourceDecl source;
  EtaGridDecl eta_grid;
  std::vector<Output> outputs;
  std::optional<double> probe_radius;
  std::optional<BoundsDecl> bounds;
  /// The document as parsed, echoed into the run manifest.
  nlohmann::json document;
};

/// Parses and structurally validates a scenario document. Throws ScenarioError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

/// Mathematical preconditions of the scenario (q > r_e, family requirements,
/// probe radius). Throws calr::PreconditionError.
void check_preconditions(const Scenario& s);

calr::SweepTemplate sweep_template(const Scenario& s);
calr::Coupling coupling(const Scenario& s);
calr::SourceSpectrum build_source(const Scenario& s);
/// The eta grid in scenario order (decreasing).
std::vector<double> build_etas(const Scenario& s);

std::string to_string(Materials m);
std::string to_string(Output o);
std::string to_string(BoundsFamily f);
std::string output_file(Output o);

}  // namespace calr_lab
