#pragma once

#include <map>
#include <optional>
#include <string>

#include "calr/config.hpp"
#include "calr/mode_energy.hpp"

namespace calr {

/// Upper (primal) and lower (dual) bounds on the dissipated energy for the
/// whole-space-loss structures, evaluated on explicit per-degree test
/// functions.
///
/// The primal functional is
///   I(v, w) = eta/2 int |grad v|^2 + 1/(2 eta) int |grad w|^2
/// over pairs with div(eps grad v) - lap w = f, and the dual functional is
///   J(v, psi) = int f psi - eta/2 int |grad v|^2 - eta/2 int |grad psi|^2
/// over pairs with div(eps grad psi) + eta lap v = 0, where eps is the
/// lossless permittivity. Every admissible pair satisfies J <= E <= I.
///
/// The test functions are written for a core of radius 1. A structure with
/// general r_i is evaluated in the rescaled variable x / r_i, with the density
/// coefficients multiplied by r_i, and every energy and pairing multiplied by
/// r_i on the way back. Sources must be real-valued densities (conjugate
/// symmetric spectra); the per-(k, l) families are then summed over l.

enum class FamilyKind {
  /// r^k inside r_e, r_e^{2k+1} r^{-k-1} outside (kernel of the coreless shell).
  PsiHat,
  /// Degree-k solution for the standard structure eps_c = 1, eps_s = -1.
  VHatNR1,
  /// Degree-k solution for eps_c = 1, eps_s = -1 - 1/k_ref.
  VHatCRC,
  /// r^k inside the source sphere, q^{2k+1} r^{-k-1} outside.
  VTilde,
};

std::string to_string(FamilyKind kind);

/// Which real part of the complex harmonic a dual family uses.
enum class FamilyPart { Re, Im };

struct TestFamily {
  FamilyKind kind = FamilyKind::PsiHat;
  /// Reference degree (k0, k(eta) or k_ref).
  int degree = 1;
  /// Weight of the reference-degree member.
  cdouble lambda{0.0, 0.0};
  /// Order l of the dual families; unused by the primal ones.
  int order = 0;
  FamilyPart part = FamilyPart::Re;
};

struct BoundReport {
  double eta = 0.0;
  /// I for primal reports (sum of parts), J for dual reports
  /// (source-pairing minus the energy parts).
  double value = 0.0;
  /// "source-pairing", "v-energy", "w-energy", "psi-energy"; energies
  /// include their eta factors.
  std::map<std::string, double> parts;
  TestFamily family;
  /// Extra numbers: constraint residuals, optimal weights, envelopes.
  std::map<std::string, double> diagnostics;
};

/// Dirichlet energy of psi-hat_k: (2k+1) r_e^{2k+1}.
double psi_hat_energy(int k, double r_e);

/// psi-hat_k as a radial profile (permittivity -1 - 1/k inside r_e, 1 outside).
RadialProfile psi_hat_profile(int k, double r_e);

/// -int_{|x| = r_e} conj(psi) [d psi / dr], the surface form of its energy.
double psi_hat_jump_pairing(int k, double r_e);

/// Degree-k member of the standard-structure primal family (core radius 1).
RadialProfile nr1_profile(int k, double r_e, double q);
/// Weight making lambda * nr1_profile carry the density alpha on |x| = q.
cdouble nr1_lambda(cdouble alpha, int k, double r_e, double q);

/// Degree-k member of the primal family for eps_s = -1 - 1/k_ref.
RadialProfile crc_profile(int k, int k_ref, double r_e, double q);
cdouble crc_lambda(cdouble alpha, int k, int k_ref, double r_e, double q);

/// r^k inside q, q^{2k+1} r^{-k-1} outside, with the permittivities of the
/// eps_s = -1 - 1/k shell (so its flux jumps at 1 and r_e are visible).
RadialProfile vtilde_profile(int k, double r_e, double q);
cdouble vtilde_lambda(cdouble alpha, int k, double q);

/// Density alpha on |x| = q minus lambda times the flux jump of the profile
/// there, relative to |alpha|; plus continuity and flux residuals at every
/// other interface. Used to certify the constraints per mode.
double primal_constraint_residual(const RadialProfile& p, cdouble lambda, cdouble alpha, double q);

/// Primal bound for the standard structure (eps_c = eps_m = 1,
/// eps_s = -1, whole-space loss): v = sum lambda_k v-hat_k, w = 0.
/// `cfg.eta` is ignored in favour of `eta`. Throws PreconditionError for
/// other structures, sources not on |x| = q > r_e, or complex densities.
BoundReport primal_bound_nr1(const LayeredConfig& cfg, const SourceSpectrum& src, double eta);

/// Coreless structure (eps_c = eps_s = -1 - 1/k0, eps_m = 1, whole-space loss)
/// with psi = lambda Re/Im conj(psi-hat_{k0} Y) and v = 0, at loss cfg.eta.
/// Reports J(lambda) and, in diagnostics, "lambda-star" and "optimum".
/// The order and part are the ones with the largest optimum unless `part`
/// is given; a zero coefficient for the requested part throws
/// PreconditionError.
BoundReport dual_bound_r1(const LayeredConfig& cfg, const SourceSpectrum& src, int k0, double lambda,
                          std::optional<FamilyPart> part = std::nullopt);

/// Spherical-core structure (real eps_c in [tau0, 1/tau0], eps_s = -1 - 1/k(eta)
/// with k(eta) from the r_e-band rule, eps_m = 1, whole-space loss), with
/// psi = lambda Re/Im conj(psi-hat_{k(eta)}) and v solving
/// eta lap v = -div(eps grad psi) exactly. Without `lambda` the maximizing
/// weight is used. Diagnostics carry the envelope
/// (C~ alpha)^2 (r_e/q)^2 (r_e^3/q^2)^k / (4 C k) with its fitted constants.
/// Requires r_e < q < r_e^{3/2} (rescaled units).
BoundReport dual_bound_r2(const LayeredConfig& cfg, const SourceSpectrum& src, double eta,
                          std::optional<double> lambda = std::nullopt);

enum class CrcMode {
  /// eps_s = -1 - 1/k0 with k0 fixed: all degrees use v-hat, w = 0.
  FixedK0,
  /// eps_s = -1 - 1/k(eta): degree k(eta) uses V-tilde and w absorbs the
  /// flux jumps it leaves at r = 1 and r = r_e.
  AdaptiveK,
};

std::string to_string(CrcMode mode);

/// Primal bound on the eps_c = 1 structure. FixedK0 reads k0 from eps_s;
/// AdaptiveK needs eps_s = -1 - 1/k(eta) and q > r* (PreconditionError
/// otherwise).
BoundReport primal_bound_crc(const LayeredConfig& cfg, const SourceSpectrum& src, double eta, CrcMode mode);

}  // namespace calr
