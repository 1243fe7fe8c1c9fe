#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calr/config.hpp"
#include "calr/energy.hpp"
#include "calr/mode_energy.hpp"
#include "calr/modes.hpp"

namespace calr {

/// Spherical coordinates (r, theta, phi).
struct FieldPoint {
  double r = 1.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct FieldSample {
  FieldPoint point;
  /// The solution u.
  cdouble value;
  /// Newtonian potential F of the source.
  cdouble newtonian;
  /// u - F, summed mode by mode so that it does not suffer from cancellation.
  cdouble anomaly;
};

/// Evaluates u and F for one configuration and source; mode coefficients
/// are solved once at construction.
class FieldEvaluator {
 public:
  /// Throws ModeSingularity for an unsolvable degree and DomainError for
  /// q <= r_e.
  FieldEvaluator(const LayeredConfig& cfg, const SourceSpectrum& src);

  /// One-sided evaluation at an interface radius picks the layer by `side`.
  /// Throws DomainError on the source sphere |x| = q, where the field has a kink.
  [[nodiscard]] FieldSample sample(const FieldPoint& x, Side side = Side::Inner) const;

  [[nodiscard]] const std::map<int, ModeCoefficients>& modes() const { return modes_; }

 private:
  LayeredConfig cfg_;
  SourceSpectrum src_;
  std::map<int, ModeCoefficients> modes_;
  std::map<int, RadialProfile> profiles_;
};

FieldSample eval_field(const LayeredConfig& cfg, const SourceSpectrum& src, const FieldPoint& x);

/// Default probe radius max(1.05 r*, 1.05 q).
double default_probe_radius(const LayeredConfig& cfg, double q);

/// Points theta_j = 2 pi j / n on the great circle through the poles in the
/// phi = 0 / phi = pi plane.
std::vector<FieldPoint> probe_ring(double radius, int n = 33);

struct DiagnosticPoint {
  double eta = 0.0;
  std::optional<int> k_eta;
  /// E as a double (may be +inf for extreme sweeps).
  double energy = 0.0;
  /// max over the ring of |u| / sqrt(E); NaN when undefined.
  double ratio = 0.0;
  /// Empty, or why the ratio is undefined (zero energy, mode singularity).
  std::string status;
};

enum class DiagnosticTrend {
  /// Strictly decreasing over the last five defined points.
  Vanishing,
  NotVanishing,
  /// Fewer than five defined points.
  Undefined,
};

std::string to_string(DiagnosticTrend t);

struct CalrDiagnostic {
  double probe_radius = 0.0;
  std::vector<DiagnosticPoint> points;
  DiagnosticTrend trend = DiagnosticTrend::Undefined;
  /// Verdict of the energy sweep over the same grid.
  Verdict energy_verdict = Verdict::Inconclusive;
};

/// Normalized-field check along an eta sweep: |u| / sqrt(E) on a 33-point
/// probe ring. Requires probe_radius > r_e (default: default_probe_radius).
CalrDiagnostic calr_diagnostic(const SweepTemplate& tpl, const SourceSpectrum& src, const std::vector<double>& etas,
                               Coupling coupling, std::optional<double> probe_radius = std::nullopt,
                               int threads = 1);

}  // namespace calr
