#include "calr/scaled_complex.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace calr {

namespace {

// Beyond this exponent gap the smaller addend is below one ulp of the larger.
constexpr std::int64_t kNegligibleGap = 110;

}  // namespace

ScaledComplex::ScaledComplex(double value) : mantissa_(value, 0.0) { normalize(); }

ScaledComplex::ScaledComplex(complex value) : mantissa_(value) { normalize(); }

ScaledComplex::ScaledComplex(complex mantissa, std::int64_t exponent)
    : mantissa_(mantissa), exponent_(exponent) {
  normalize();
}

void ScaledComplex::normalize() {
  if (!std::isfinite(mantissa_.real()) || !std::isfinite(mantissa_.imag())) {
    throw std::domain_error("ScaledComplex: non-finite mantissa");
  }
  const double mag = std::abs(mantissa_);
  if (mag == 0.0) {
    mantissa_ = {};
    exponent_ = 0;
    return;
  }
  int e = 0;
  std::frexp(mag, &e);  // mag = f * 2^e, f in [0.5, 1)
  const int shift = e - 1;
  mantissa_ = {std::ldexp(mantissa_.real(), -shift), std::ldexp(mantissa_.imag(), -shift)};
  exponent_ += shift;
  // hypot rounding can land exactly on 2 or just below 1
  const double m2 = std::abs(mantissa_);
  if (m2 >= 2.0) {
    mantissa_ *= 0.5;
    exponent_ += 1;
  } else if (m2 < 1.0) {
    mantissa_ *= 2.0;
    exponent_ -= 1;
  }
}

ScaledComplex ScaledComplex::power(double base, std::int64_t n) {
  if (!(base > 0.0) || !std::isfinite(base)) {
    throw std::domain_error("ScaledComplex::power: base must be positive and finite");
  }
  ScaledComplex result(1.0);
  ScaledComplex factor(base);
  std::int64_t m = n < 0 ? -n : n;
  while (m > 0) {
    if (m & 1) result *= factor;
    factor *= factor;
    m >>= 1;
  }
  if (n < 0) return ScaledComplex(1.0) / result;
  return result;
}

ScaledComplex::complex ScaledComplex::to_complex() const {
  if (is_zero()) return {};
  const auto clamp = [](std::int64_t e) {
    // ldexp saturates for |e| beyond the double range anyway
    constexpr std::int64_t lim = 1 << 20;
    return static_cast<int>(e > lim ? lim : (e < -lim ? -lim : e));
  };
  const int e = clamp(exponent_);
  return {std::ldexp(mantissa_.real(), e), std::ldexp(mantissa_.imag(), e)};
}

ScaledComplex ScaledComplex::abs() const { return {complex(std::abs(mantissa_), 0.0), exponent_}; }

ScaledComplex ScaledComplex::norm() const {
  return {complex(std::norm(mantissa_), 0.0), 2 * exponent_};
}

ScaledComplex ScaledComplex::conj() const { return {std::conj(mantissa_), exponent_}; }

ScaledComplex ScaledComplex::sqrt() const {
  if (is_zero()) return {};
  if (exponent_ % 2 == 0) return {std::sqrt(mantissa_), exponent_ / 2};
  // odd exponent: fold one factor of two into the mantissa
  return {std::sqrt(2.0 * mantissa_), (exponent_ - 1) / 2};
}

double ScaledComplex::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(mantissa_)) + static_cast<double>(exponent_) * std::log(2.0);
}

ScaledComplex& ScaledComplex::operator+=(const ScaledComplex& rhs) {
  if (rhs.is_zero()) return *this;
  if (is_zero()) return *this = rhs;
  const std::int64_t gap = exponent_ - rhs.exponent_;
  if (gap > kNegligibleGap) return *this;
  if (gap < -kNegligibleGap) return *this = rhs;
  const int g = static_cast<int>(gap);
  const complex aligned{std::ldexp(rhs.mantissa_.real(), -g), std::ldexp(rhs.mantissa_.imag(), -g)};
  mantissa_ += aligned;
  normalize();
  return *this;
}

ScaledComplex& ScaledComplex::operator-=(const ScaledComplex& rhs) { return *this += -rhs; }

ScaledComplex& ScaledComplex::operator*=(const ScaledComplex& rhs) {
  mantissa_ *= rhs.mantissa_;
  exponent_ += rhs.exponent_;
  normalize();
  return *this;
}

ScaledComplex& ScaledComplex::operator/=(const ScaledComplex& rhs) {
  if (rhs.is_zero()) throw std::domain_error("ScaledComplex: division by zero");
  mantissa_ /= rhs.mantissa_;
  exponent_ -= rhs.exponent_;
  normalize();
  return *this;
}

bool real_less(const ScaledComplex& a, const ScaledComplex& b) { return (a - b).mantissa().real() < 0.0; }

double relative_difference(const ScaledComplex& a, const ScaledComplex& b) {
  if (a.is_zero() && b.is_zero()) return 0.0;
  const ScaledComplex diff = (a - b).abs();
  const ScaledComplex scale = real_less(a.abs(), b.abs()) ? b.abs() : a.abs();
  return (diff / scale).real();
}

std::ostream& operator<<(std::ostream& os, const ScaledComplex& z) {
  return os << z.mantissa() << "*2^" << z.exponent();
}

}  // namespace calr
