#include "calr/harmonics.hpp"

#include <cmath>
#include <numbers>

#include "calr/errors.hpp"

namespace calr {

namespace {

void check(ModeIndex m, double theta) {
  if (!m.valid()) throw DomainError("eval_harmonic: need |l| <= k");
  if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
    throw DomainError("eval_harmonic: theta must lie in [0, pi]");
  }
}

// Y_k^m for m >= 0. std::sph_legendre already carries the (-1)^m phase.
cdouble positive_order(int k, int m, double theta, double phi) {
  const double p = std::sph_legendre(static_cast<unsigned>(k), static_cast<unsigned>(m), theta);
  return p * std::polar(1.0, m * phi);
}

}  // namespace

cdouble eval_harmonic(ModeIndex m, double theta, double phi) {
  check(m, theta);
  if (m.l >= 0) return positive_order(m.k, m.l, theta, phi);
  const cdouble y = positive_order(m.k, -m.l, theta, phi);
  return ((-m.l) % 2 == 0 ? 1.0 : -1.0) * std::conj(y);
}

cdouble eval_harmonic_dtheta(ModeIndex m, double theta, double phi) {
  check(m, theta);
  if (theta == 0.0 || theta == std::numbers::pi) {
    throw DomainError("eval_harmonic_dtheta: polar angle must be interior");
  }
  // dY_k^l/dtheta = l cot(theta) Y_k^l + sqrt((k-l)(k+l+1)) e^{-i phi} Y_k^{l+1}
  const cdouble y = eval_harmonic(m, theta, phi);
  cdouble d = static_cast<double>(m.l) / std::tan(theta) * y;
  if (m.l < m.k) {
    const double c = std::sqrt(static_cast<double>(m.k - m.l) * static_cast<double>(m.k + m.l + 1));
    d += c * std::polar(1.0, -phi) * eval_harmonic({m.k, m.l + 1}, theta, phi);
  }
  return d;
}

}  // namespace calr
