#include "calr/mode_energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "calr/errors.hpp"

namespace calr {

namespace {

// 1 - (r0/r1)^n without cancellation; r1 may be infinite.
double one_minus_ratio_power(double r0, double r1, std::int64_t n) {
  if (std::isinf(r1) || r0 == 0.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log(r0 / r1));
}

}  // namespace

ScaledComplex radial_power(double r, std::int64_t n) { return ScaledComplex::power(r, n); }

ScaledComplex mode_shell_energy(int k, const ScaledComplex& b, const ScaledComplex& c, double r0,
                                double r1) {
  if (k < 0) throw DomainError("mode_shell_energy: negative degree");
  if (!(r0 >= 0.0) || !(r1 > r0)) throw DomainError("mode_shell_energy: need 0 <= r0 < r1");
  const bool r1_inf = std::isinf(r1);
  const std::int64_t n = 2 * static_cast<std::int64_t>(k) + 1;

  ScaledComplex total;
  if (!b.is_zero() && k > 0) {
    if (r1_inf) throw DomainError("mode_shell_energy: growing term on an unbounded shell");
    // |b|^2 k r1^n (1 - (r0/r1)^n)
    total += b.norm() * ScaledComplex(static_cast<double>(k)) * radial_power(r1, n) *
             ScaledComplex(one_minus_ratio_power(r0, r1, n));
  }
  if (!c.is_zero()) {
    if (r0 == 0.0) throw DomainError("mode_shell_energy: singular integrand at the origin");
    // |c|^2 (k+1) r0^{-n} (1 - (r0/r1)^n)
    total += c.norm() * ScaledComplex(static_cast<double>(k + 1)) * radial_power(r0, -n) *
             ScaledComplex(one_minus_ratio_power(r0, r1, n));
  }
  return total;
}

RadialProfile::RadialProfile(int degree, std::vector<RadialPiece> pieces)
    : degree_(degree), pieces_(std::move(pieces)) {
  if (degree_ < 0) throw DomainError("RadialProfile: negative degree");
  if (pieces_.empty()) throw DomainError("RadialProfile: no pieces");
  if (pieces_.front().r_lo != 0.0) throw DomainError("RadialProfile: first piece must start at 0");
  if (!std::isinf(pieces_.back().r_hi)) throw DomainError("RadialProfile: last piece must be unbounded");
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (!(pieces_[i].r_hi > pieces_[i].r_lo)) throw DomainError("RadialProfile: empty piece");
    if (i > 0 && pieces_[i].r_lo != pieces_[i - 1].r_hi) {
      throw DomainError("RadialProfile: pieces must be contiguous");
    }
  }
  if (!pieces_.front().decay.is_zero()) {
    throw DomainError("RadialProfile: innermost piece must be regular at the origin");
  }
  if (!pieces_.back().grow.is_zero() && degree_ > 0) {
    throw DomainError("RadialProfile: outermost piece must decay");
  }
}

std::vector<double> RadialProfile::interfaces() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < pieces_.size(); ++i) out.push_back(pieces_[i].r_lo);
  return out;
}

const RadialPiece& RadialProfile::piece_at(double r, Side side) const {
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (r < p.r_hi) return p;
    if (r == p.r_hi) return side == Side::Inner || i + 1 == pieces_.size() ? p : pieces_[i + 1];
  }
  return pieces_.back();
}

ScaledComplex RadialProfile::value(double r, Side side) const {
  if (!(r > 0.0)) throw DomainError("RadialProfile: evaluation needs r > 0");
  const auto& p = piece_at(r, side);
  const std::int64_t k = degree_;
  ScaledComplex v;
  if (!p.grow.is_zero()) v += p.grow * radial_power(r, k);
  if (!p.decay.is_zero()) v += p.decay * radial_power(r, -k - 1);
  return v;
}

ScaledComplex RadialProfile::derivative(double r, Side side) const {
  if (!(r > 0.0)) throw DomainError("RadialProfile: evaluation needs r > 0");
  const auto& p = piece_at(r, side);
  const std::int64_t k = degree_;
  ScaledComplex d;
  if (!p.grow.is_zero() && k > 0) d += p.grow * ScaledComplex(static_cast<double>(k)) * radial_power(r, k - 1);
  if (!p.decay.is_zero()) d -= p.decay * ScaledComplex(static_cast<double>(k + 1)) * radial_power(r, -k - 2);
  return d;
}

ScaledComplex RadialProfile::flux(double r, Side side) const {
  return ScaledComplex(piece_at(r, side).eps) * derivative(r, side);
}

ScaledComplex RadialProfile::flux_jump(double r) const { return flux(r, Side::Outer) - flux(r, Side::Inner); }

double RadialProfile::continuity_residual(double r) const {
  return relative_difference(value(r, Side::Outer), value(r, Side::Inner));
}

double RadialProfile::flux_residual(double r) const {
  return relative_difference(flux(r, Side::Outer), flux(r, Side::Inner));
}

ScaledComplex RadialProfile::dirichlet_energy() const {
  ScaledComplex total;
  for (const auto& p : pieces_) total += mode_shell_energy(degree_, p.grow, p.decay, p.r_lo, p.r_hi);
  return total;
}

ScaledComplex RadialProfile::dirichlet_energy(double r_lo, double r_hi) const {
  ScaledComplex total;
  for (const auto& p : pieces_) {
    const double lo = std::max(p.r_lo, r_lo);
    const double hi = std::min(p.r_hi, r_hi);
    if (hi > lo) total += mode_shell_energy(degree_, p.grow, p.decay, lo, hi);
  }
  return total;
}

RadialProfile RadialProfile::scaled(const ScaledComplex& s) const {
  auto pieces = pieces_;
  for (auto& p : pieces) {
    p.grow *= s;
    p.decay *= s;
  }
  return {degree_, std::move(pieces)};
}

}  // namespace calr
