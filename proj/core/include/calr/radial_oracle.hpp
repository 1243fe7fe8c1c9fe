#pragma once

#include "calr/config.hpp"
#include "calr/modes.hpp"

namespace calr {

/// Brute-force check of the mode solvers.
///
/// Solves the radial two-point problem
///   d/dr(eps r^2 R') - eps k(k+1) R = (delta shell at q)
/// by a conservative second-order finite-volume scheme on a grid that is
/// uniform in log r within each layer (so geometrically graded towards r_i,
/// r_e and q), with exact regularity/decay (Robin) conditions at the
/// truncation radii r_i/4 and 20 q. The coefficients (a, b, c, d) are then
/// least-squares fitted layer by layer and normalized by the fitted incoming
/// coefficient.
struct RadialGridSpec {
  /// Approximate node count at refinement level 0.
  int nodes = 4000;
  /// Each level doubles every layer's cell count.
  int refine_level = 0;
};

/// Fitted coefficients from a single grid; error is O(h^2).
ModeCoefficients radial_fd_coefficients(const LayeredConfig& cfg, int k, double q,
                                        RadialGridSpec grid = {});

struct RadialOracleResult {
  ModeCoefficients coeffs;
  /// Observed convergence order from three nested grids (NaN when the
  /// differences are already at rounding level).
  double observed_order = 0.0;
  /// Distance between the two finest grids before extrapolation.
  double refinement_change = 0.0;
};

/// Richardson-extrapolated oracle (grids N, 2N, 4N). Requires 1 <= k <= 20
/// and q > r_e. Throws OracleFailure when refinement does not converge.
RadialOracleResult radial_oracle_report(const LayeredConfig& cfg, int k, double q, int nodes = 4000);

inline ModeCoefficients radial_oracle(const LayeredConfig& cfg, int k, double q) {
  return radial_oracle_report(cfg, k, q).coeffs;
}

}  // namespace calr
