#pragma once

#include <vector>

#include "calr/config.hpp"
#include "calr/scaled_complex.hpp"

namespace calr {

/// Exact Dirichlet integral of u = (b r^k + c r^{-k-1}) Y_k^l over the
/// spherical shell r0 < |x| < r1, for an orthonormal Y_k^l:
///
///   |b|^2 k (r1^{2k+1} - r0^{2k+1}) + |c|^2 (k+1) (r0^{-2k-1} - r1^{-2k-1}).
///
/// The b-c cross terms cancel identically. r1 may be +inf when b == 0, and
/// r0 may be 0 when c == 0; otherwise throws DomainError.
ScaledComplex mode_shell_energy(int k, const ScaledComplex& b, const ScaledComplex& c, double r0,
                                double r1);

/// Which side of an interface a one-sided evaluation refers to.
enum class Side { Inner, Outer };

/// One layer of a piecewise-harmonic radial profile:
/// R(r) = grow * r^k + decay * r^{-k-1} for r_lo < r < r_hi.
struct RadialPiece {
  double r_lo = 0.0;
  double r_hi = 0.0;
  cdouble eps{1.0, 0.0};
  ScaledComplex grow;
  ScaledComplex decay;
};

/// Radial part of a single-degree field R(r) Y_k^l built from harmonic pieces
/// on concentric layers [0, r_1], [r_1, r_2], ..., [r_n, inf).
///
/// Every test function of the variational bounds (and every mode solution)
/// has this shape; the class evaluates values, fluxes eps dR/dr, interface
/// jumps and the exact Dirichlet energy.
class RadialProfile {
 public:
  RadialProfile(int degree, std::vector<RadialPiece> pieces);

  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const std::vector<RadialPiece>& pieces() const { return pieces_; }
  /// Interior breakpoints r_1 < ... < r_n.
  [[nodiscard]] std::vector<double> interfaces() const;

  [[nodiscard]] ScaledComplex value(double r, Side side = Side::Inner) const;
  [[nodiscard]] ScaledComplex derivative(double r, Side side = Side::Inner) const;
  /// eps * dR/dr using the layer's permittivity.
  [[nodiscard]] ScaledComplex flux(double r, Side side = Side::Inner) const;

  /// Outer minus inner flux at an interface radius.
  [[nodiscard]] ScaledComplex flux_jump(double r) const;
  /// |R(r+) - R(r-)| relative to max(|R(r+)|, |R(r-)|).
  [[nodiscard]] double continuity_residual(double r) const;
  /// |flux jump| relative to the larger one-sided flux.
  [[nodiscard]] double flux_residual(double r) const;

  /// Integral of |grad(R Y_k^l)|^2 over all of R^3.
  [[nodiscard]] ScaledComplex dirichlet_energy() const;
  /// Same integral restricted to r_lo < |x| < r_hi.
  [[nodiscard]] ScaledComplex dirichlet_energy(double r_lo, double r_hi) const;

  [[nodiscard]] RadialProfile scaled(const ScaledComplex& s) const;

 private:
  [[nodiscard]] const RadialPiece& piece_at(double r, Side side) const;

  int degree_;
  std::vector<RadialPiece> pieces_;
};

/// r^n in extended range.
ScaledComplex radial_power(double r, std::int64_t n);

}  // namespace calr
