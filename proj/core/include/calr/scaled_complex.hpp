#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>

namespace calr {

/// Extended-range complex number: value = mantissa * 2^exponent.
///
/// The mantissa is kept with magnitude in [1, 2) (or exactly zero with a zero
/// exponent), so products such as r_e^{3k} / r_i^k stay representable for
/// degrees far beyond the double-precision range.
class ScaledComplex {
 public:
  using complex = std::complex<double>;

  constexpr ScaledComplex() = default;
  ScaledComplex(double value);  // NOLINT(google-explicit-constructor)
  ScaledComplex(complex value);  // NOLINT(google-explicit-constructor)
  ScaledComplex(complex mantissa, std::int64_t exponent);

  /// base^n for real base > 0 and any integer n, computed by repeated
  /// squaring so that no intermediate over- or underflows.
  static ScaledComplex power(double base, std::int64_t n);

  [[nodiscard]] const complex& mantissa() const { return mantissa_; }
  [[nodiscard]] std::int64_t exponent() const { return exponent_; }

  [[nodiscard]] bool is_zero() const { return mantissa_ == complex{}; }

  /// Native value; overflows to +-inf and underflows to 0 like the hardware.
  [[nodiscard]] complex to_complex() const;
  [[nodiscard]] double real() const { return to_complex().real(); }

  /// |z| as an extended-range real.
  [[nodiscard]] ScaledComplex abs() const;
  /// |z|^2 as an extended-range real.
  [[nodiscard]] ScaledComplex norm() const;
  [[nodiscard]] ScaledComplex conj() const;
  /// Principal square root.
  [[nodiscard]] ScaledComplex sqrt() const;

  /// log|z| (natural log); -inf for zero.
  [[nodiscard]] double log_abs() const;

  ScaledComplex& operator+=(const ScaledComplex& rhs);
  ScaledComplex& operator-=(const ScaledComplex& rhs);
  ScaledComplex& operator*=(const ScaledComplex& rhs);
  ScaledComplex& operator/=(const ScaledComplex& rhs);

  friend ScaledComplex operator+(ScaledComplex lhs, const ScaledComplex& rhs) { return lhs += rhs; }
  friend ScaledComplex operator-(ScaledComplex lhs, const ScaledComplex& rhs) { return lhs -= rhs; }
  friend ScaledComplex operator*(ScaledComplex lhs, const ScaledComplex& rhs) { return lhs *= rhs; }
  friend ScaledComplex operator/(ScaledComplex lhs, const ScaledComplex& rhs) { return lhs /= rhs; }
  friend ScaledComplex operator-(const ScaledComplex& z) { return {-z.mantissa_, z.exponent_}; }

  friend bool operator==(const ScaledComplex& a, const ScaledComplex& b) {
    return a.mantissa_ == b.mantissa_ && a.exponent_ == b.exponent_;
  }

 private:
  void normalize();

  complex mantissa_{};
  std::int64_t exponent_ = 0;
};

/// Ordering of the real parts, valid for real-valued extended numbers
/// (energies, magnitudes). Imaginary parts are ignored.
bool real_less(const ScaledComplex& a, const ScaledComplex& b);

/// Relative distance |a - b| / max(|a|, |b|); 0 when both vanish.
double relative_difference(const ScaledComplex& a, const ScaledComplex& b);

std::ostream& operator<<(std::ostream& os, const ScaledComplex& z);

}  // namespace calr
