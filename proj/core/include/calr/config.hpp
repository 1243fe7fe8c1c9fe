#pragma once

#include <complex>
#include <compare>
#include <map>
#include <string_view>
#include <vector>

namespace calr {

using cdouble = std::complex<double>;

/// Where the loss i*eta is added: the plasmonic shell only, or all of space.
enum class LossRegion { Shell, WholeSpace };

std::string_view to_string(LossRegion region);

/// Concentric core/shell/matrix structure with a loss parameter.
///
/// The permittivity is piecewise constant: eps_c for r <= r_i, eps_s for
/// r_i < r <= r_e, eps_m outside, with +i*eta added on the loss region.
struct LayeredConfig {
  double r_i = 1.0;
  double r_e = 2.0;
  cdouble eps_c{1.0, 0.0};
  cdouble eps_s{1.0, 0.0};
  cdouble eps_m{1.0, 0.0};
  double eta = 0.0;
  LossRegion loss_region = LossRegion::Shell;

  /// r_i / r_e
  [[nodiscard]] double rho() const { return r_i / r_e; }

  [[nodiscard]] cdouble core_eff() const;
  [[nodiscard]] cdouble shell_eff() const;
  [[nodiscard]] cdouble matrix_eff() const;
  /// Effective permittivity at radius r; interfaces belong to the inner layer.
  [[nodiscard]] cdouble eps_at(double r) const;

  [[nodiscard]] bool is_valid() const;
  /// Throws DomainError naming the violated invariant.
  void validate() const;
};

/// Degree/order pair of a spherical harmonic; |l| <= k.
struct ModeIndex {
  int k = 0;
  int l = 0;

  [[nodiscard]] bool valid() const { return k >= 0 && l >= -k && l <= k; }
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

enum class SourceKind {
  /// Surface density F = sum alpha_k^l Y_k^l on the sphere |x| = q.
  DeltaShell,
  /// Newtonian-potential coefficients: F = sum beta_k^l r^k Y_k^l for r < q.
  Multipole,
};

std::string_view to_string(SourceKind kind);

/// Spherical-harmonic description of a zero-mean source supported at |x| = q.
///
/// Both kinds describe the same physical object: a Multipole spectrum is the
/// interior expansion of the Newtonian potential of a surface density on the
/// sphere of radius q, related to the density coefficients by
/// beta = -alpha q^{1-k} / (2k+1).
class SourceSpectrum {
 public:
  SourceSpectrum(SourceKind kind, double support_radius, int k_max);

  /// Zonal source with coefficient amplitude * scale^{-k} for 1 <= k <= k_max.
  static SourceSpectrum zonal_geometric(SourceKind kind, double support_radius, double scale,
                                        int k_max, double amplitude = 1.0);
  /// Zonal source with a constant coefficient for every degree 1..k_max.
  static SourceSpectrum zonal_constant(SourceKind kind, double support_radius, cdouble value,
                                       int k_max);
  /// One (k, l) coefficient.
  static SourceSpectrum single(SourceKind kind, double support_radius, ModeIndex m, cdouble value,
                               int k_max = 64);

  void set(ModeIndex m, cdouble value);

  [[nodiscard]] SourceKind kind() const { return kind_; }
  [[nodiscard]] double support_radius() const { return q_; }
  [[nodiscard]] int k_max() const { return k_max_; }
  /// Stored coefficients in the spectrum's own kind.
  [[nodiscard]] const std::map<ModeIndex, cdouble>& coefficients() const { return coeffs_; }

  /// Newtonian-potential coefficient beta_k^l (zero if not stored).
  [[nodiscard]] cdouble beta(ModeIndex m) const;
  /// Surface-density coefficient alpha_k^l (zero if not stored).
  [[nodiscard]] cdouble alpha(ModeIndex m) const;

  /// Sorted distinct degrees carrying a nonzero coefficient.
  [[nodiscard]] std::vector<int> degrees() const;
  /// Coefficients (in the requested kind) of one degree, ordered by l.
  [[nodiscard]] std::vector<std::pair<int, cdouble>> degree_coefficients(int k, SourceKind as) const;
  /// sum_l |beta_k^l|^2
  [[nodiscard]] double beta_power(int k) const;
  /// sum_l |alpha_k^l|^2
  [[nodiscard]] double alpha_power(int k) const;

  /// True when the spectrum describes a real-valued density:
  /// c_k^{-l} = (-1)^l conj(c_k^l) to the given relative tolerance.
  [[nodiscard]] bool is_real_valued(double tol = 1e-12) const;

  /// Copy with every coefficient multiplied by s.
  [[nodiscard]] SourceSpectrum scaled(double s) const;
  /// Copy keeping only degrees <= k_max.
  [[nodiscard]] SourceSpectrum truncated(int k_max) const;

 private:
  SourceKind kind_;
  double q_;
  int k_max_;
  std::map<ModeIndex, cdouble> coeffs_;
};

/// beta from alpha for a density on the sphere of radius q.
cdouble density_to_multipole(cdouble alpha, int k, double q);
/// alpha from beta for a density on the sphere of radius q.
cdouble multipole_to_density(cdouble beta, int k, double q);

/// Default truncation degree for generated spectra.
inline constexpr int kDefaultKMax = 64;

}  // namespace calr
