#pragma once

#include <complex>

#include "calr/config.hpp"

namespace calr {

/// Orthonormal spherical harmonic Y_k^l(theta, phi) with the Condon-Shortley
/// phase, so that Y_k^{-l} = (-1)^l conj(Y_k^l) and the family is an
/// orthonormal basis of L^2 on the unit sphere.
///
/// Throws DomainError for |l| > k or theta outside [0, pi].
cdouble eval_harmonic(ModeIndex m, double theta, double phi);

/// d/dtheta of Y_k^l at an interior polar angle 0 < theta < pi.
cdouble eval_harmonic_dtheta(ModeIndex m, double theta, double phi);

}  // namespace calr
