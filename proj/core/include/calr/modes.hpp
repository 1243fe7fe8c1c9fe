#pragma once

#include <utility>

#include "calr/config.hpp"
#include "calr/mode_energy.hpp"
#include "calr/scaled_complex.hpp"

namespace calr {

/// Per-degree coefficients of the three-layer solution, normalized so that
/// the incoming exterior coefficient (of r^k outside the device) equals 1:
///
///   core   R = a r^k
///   shell  R = b r^k + c r^{-k-1}
///   matrix R = r^k + d r^{-k-1}     (inside the source sphere)
struct ModeCoefficients {
  int k = 0;
  ScaledComplex a;
  ScaledComplex b;
  ScaledComplex c;
  ScaledComplex d;
};

struct ModeDiagnostics {
  /// Common denominator of the closed-form coefficients.
  ScaledComplex denominator;
  /// Max relative residual of the four transmission conditions.
  double residual = 0.0;
  /// 1 / rcond of the row-equilibrated interface system.
  double condition = 0.0;
};

/// Closed-form coefficients for degree k >= 1. Every occurrence of the shell
/// permittivity uses its effective (lossy) value; with WholeSpace loss the
/// core and matrix permittivities are effective as well.
///
/// Throws ModeSingularity when the denominator vanishes (lossless plasmonic
/// resonance at degree k) or is lost in rounding.
ModeCoefficients solve_mode_closed_form(const LayeredConfig& cfg, int k);

/// Direct LU solve of the four continuity/flux equations, independent of the
/// closed forms. Throws ModeSingularity when the system is numerically
/// singular.
std::pair<ModeCoefficients, ModeDiagnostics> solve_mode_general(const LayeredConfig& cfg, int k);

/// The closed-form denominator itself (signed, complex).
ScaledComplex closed_form_denominator(const LayeredConfig& cfg, int k);

/// |denominator|. Equals (2k+1)^2 for a homogeneous medium.
ScaledComplex denominator_magnitude(const LayeredConfig& cfg, int k);

/// Max relative residual of continuity and flux continuity at r_i and r_e.
double transmission_residual(const LayeredConfig& cfg, const ModeCoefficients& m);

/// Componentwise relative distance in the scale-free unknowns
/// (a, b, c r_i^{-2k-1}, d r_e^{-2k-1}), with components below `floor` times
/// the largest one compared in absolute terms.
double coefficient_distance(const LayeredConfig& cfg, const ModeCoefficients& x,
                            const ModeCoefficients& y, double floor = 1e-12);

/// Radial profile of the mode field for a unit incoming coefficient, with
/// the source sphere at radius q > r_e: outside q the field is
/// (q^{2k+1} + d) r^{-k-1}.
RadialProfile mode_profile(const LayeredConfig& cfg, const ModeCoefficients& m, double q);

}  // namespace calr
