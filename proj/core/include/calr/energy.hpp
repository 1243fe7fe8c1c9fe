#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calr/config.hpp"
#include "calr/modes.hpp"
#include "calr/scaled_complex.hpp"

namespace calr {

/// Dissipated power E = (eta/2) * integral over the loss region of |grad u|^2,
/// with its per-degree split.
struct EnergyBreakdown {
  double eta = 0.0;
  /// Degree selected by the loss-dependent material rule (empty for fixed runs).
  std::optional<int> k_eta;
  ScaledComplex total;
  /// Degree -> contribution summed over orders l.
  std::map<int, ScaledComplex> per_mode;
  /// Upper bound on the degrees beyond the spectrum's truncation, assuming
  /// the coefficients stay under their geometric envelope.
  double tail_bound = 0.0;
  /// Empty when the point was computed; otherwise why it was skipped
  /// (a mode singularity, for instance).
  std::string status;

  [[nodiscard]] bool ok() const { return status.empty(); }
};

/// Energy of the unit-incoming mode of degree k over the loss region
/// (shell only, or all of space), without the eta/2 factor.
ScaledComplex mode_loss_energy(const LayeredConfig& cfg, int k, double q);

/// Exact dissipated energy for a source supported on |x| = q > r_e.
/// Throws ModeSingularity (naming the degree) and DomainError for q <= r_e.
EnergyBreakdown dissipated_energy(const LayeredConfig& cfg, const SourceSpectrum& src);

/// The n largest per-degree contributions, largest first.
std::vector<std::pair<int, ScaledComplex>> top_modes(const EnergyBreakdown& e, std::size_t n);

enum class KRule {
  /// rho^k < eta <= rho^{k-1}
  ShellRule,
  /// r_e^{-k} < eta <= r_e^{1-k}
  WholeSpaceRule,
};

struct KSelection {
  int k = 1;
  /// eta was above the k = 1 band and the result was clamped to 1.
  bool clamped = false;
};

/// The degree whose band contains eta. Throws DomainError for eta <= 0 or a
/// rule whose base is not below 1 (WholeSpaceRule with r_e <= 1).
KSelection select_k_of_eta(double eta, const LayeredConfig& cfg, KRule rule);

/// sqrt(r_e^3 / r_i); not validated, so r_i == r_e gives r_e.
double critical_radius(const LayeredConfig& cfg);

/// How the permittivities follow the coupling degree k0.
enum class MaterialKind {
  /// Use the template's permittivities unchanged.
  Given,
  /// eps_c = 1, eps_s = -1.
  Standard,
  /// eps_c = eps_s = -1 - 1/k0 (no distinct core).
  Coreless,
  /// eps_s = -1 - 1/k0; eps_c = (1 + 1/k0)^2 with shell loss, or the
  /// template's eps_c when the loss fills all of space.
  PlasmonicShell,
};

std::string to_string(MaterialKind kind);

struct SweepTemplate {
  /// Geometry, loss region and (for MaterialKind::Given) permittivities.
  LayeredConfig base;
  MaterialKind materials = MaterialKind::Given;
};

/// The configuration at loss eta with coupling degree k0.
LayeredConfig materials_at(const SweepTemplate& tpl, int k0, double eta);

struct Coupling {
  enum class Mode { FixedK, Adaptive };
  Mode mode = Mode::Adaptive;
  /// Used by FixedK.
  int k0 = 1;
  /// Used by Adaptive.
  KRule rule = KRule::ShellRule;

  static Coupling fixed(int k0) { return {Mode::FixedK, k0, KRule::ShellRule}; }
  static Coupling adaptive(KRule rule) { return {Mode::Adaptive, 1, rule}; }
};

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// RMS of the log-residuals.
  double residual = 0.0;
  std::size_t used_points = 0;
};

enum class Verdict { Blowup, Bounded, Inconclusive };

std::string to_string(Verdict v);

struct EnergySweep {
  std::vector<EnergyBreakdown> points;
  /// Abscissa of each point in the fit: k(eta) for adaptive runs, the
  /// continuous band index ln(eta)/ln(base) for fixed runs.
  std::vector<double> abscissa;
  GrowthFit growth_fit;
  Verdict verdict = Verdict::Inconclusive;
};

/// Fits log E against the abscissa over the computed points and decides:
/// Blowup when E increases strictly from the first third on, the slope is
/// positive and the residual below 0.2; Bounded when the slope is <= 0 or
/// the last third never exceeds the earlier maximum; Inconclusive otherwise.
void classify_sweep(EnergySweep& sweep);

/// Dissipated energy along a strictly decreasing eta grid (eta = 0 allowed for
/// fixed coupling). Points are independent and spread over `threads` workers;
/// results do not depend on the thread count. Mode singularities mark the point instead of aborting.
EnergySweep eta_sweep(const SweepTemplate& tpl, const SourceSpectrum& src, const std::vector<double>& etas,
                      Coupling coupling, int threads = 1);

enum class SourceClass { InsideCritical, OutsideCritical, GrowthOK, GrowthFails };

std::string to_string(SourceClass c);

enum class SourceTest {
  /// limsup (sum_l |beta_k^l|)^{1/k} against 1 / r*.
  CriticalRadius,
  /// Trend of k^{-1} |alpha_k|^2 (r_e^3 / q^2)^k.
  DensityGrowth,
};

/// Rate tests on the stored spectrum, estimated by a log-linear fit over
/// the upper half of the nonzero degrees. Defaults to CriticalRadius for
/// Multipole spectra and DensityGrowth for DeltaShell ones. Throws
/// InconclusiveError with fewer than six nonzero degrees.
SourceClass classify_source(const SourceSpectrum& src, const LayeredConfig& cfg);
SourceClass classify_source(const SourceSpectrum& src, const LayeredConfig& cfg, SourceTest test);

}  // namespace calr
