#include "calr/modes.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "calr/errors.hpp"

namespace calr {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
// Below this scaled magnitude a denominator is treated as exactly zero.
const ScaledComplex kTinyDenominator = ScaledComplex::power(10.0, -280);
// A denominator within this many ulps of its uncancelled size is noise.
constexpr double kCancellationUlps = 64.0;
// Interface systems with rcond below this are singular.
constexpr double kMinRcond = 64.0 * kEps;

void check_degree(const LayeredConfig& cfg, int k) {
  cfg.validate();
  if (k < 1) throw DomainError("mode solvers need k >= 1 (k = 0 is excluded by the zero-mean source)");
}

std::string singular_message(int k, const char* what) {
  std::ostringstream os;
  os << "degree " << k << ": " << what;
  return os.str();
}

struct Denominator {
  ScaledComplex value;
  // Magnitude of the terms before cancellation.
  ScaledComplex scale;
};

Denominator denominator_parts(const LayeredConfig& cfg, int k) {
  const cdouble ec = cfg.core_eff();
  const cdouble es = cfg.shell_eff();
  const cdouble em = cfg.matrix_eff();
  const double kd = k;
  const ScaledComplex rho_pow = ScaledComplex::power(cfg.rho(), 2 * k + 1);

  const ScaledComplex t1 = rho_pow * ScaledComplex(kd * (kd + 1.0) * (es - ec) * (es - em));
  const cdouble f1 = (kd + 1.0) * es + kd * ec;
  const cdouble f2 = (kd + 1.0) * em + kd * es;
  const ScaledComplex t2(f1 * f2);

  const double raw = (std::abs((kd + 1.0) * es) + std::abs(kd * ec)) *
                     (std::abs((kd + 1.0) * em) + std::abs(kd * es));
  return {t1 - t2, t1.abs() + ScaledComplex(raw)};
}

}  // namespace

ScaledComplex closed_form_denominator(const LayeredConfig& cfg, int k) {
  check_degree(cfg, k);
  return denominator_parts(cfg, k).value;
}

ScaledComplex denominator_magnitude(const LayeredConfig& cfg, int k) {
  return closed_form_denominator(cfg, k).abs();
}

ModeCoefficients solve_mode_closed_form(const LayeredConfig& cfg, int k) {
  check_degree(cfg, k);
  const auto [den, scale] = denominator_parts(cfg, k);
  const ScaledComplex mag = den.abs();
  if (den.is_zero() || real_less(mag, kTinyDenominator)) {
    throw ModeSingularity(k, std::numeric_limits<double>::infinity(),
                          singular_message(k, "closed-form denominator vanishes"));
  }
  if (real_less(mag, scale * ScaledComplex(kCancellationUlps * kEps))) {
    throw ModeSingularity(k, (scale / mag).real(),
                          singular_message(k, "closed-form denominator is below rounding level"));
  }

  const cdouble ec = cfg.core_eff();
  const cdouble es = cfg.shell_eff();
  const cdouble em = cfg.matrix_eff();
  const double kd = k;
  const double two_k1 = 2.0 * kd + 1.0;
  const cdouble f1 = (kd + 1.0) * es + kd * ec;
  const ScaledComplex rho_pow = ScaledComplex::power(cfg.rho(), 2 * k + 1);

  ModeCoefficients m;
  m.k = k;
  m.a = ScaledComplex(-two_k1 * two_k1 * em * es) / den;
  m.b = ScaledComplex(-em * two_k1 * f1) / den;
  m.c = ScaledComplex::power(cfg.r_i, 2 * k + 1) * ScaledComplex(-em * kd * two_k1 * (es - ec)) / den;
  const ScaledComplex bracket =
      ScaledComplex((em - es) * f1) + rho_pow * ScaledComplex((es - ec) * (kd * em + (kd + 1.0) * es));
  m.d = ScaledComplex(-kd) * ScaledComplex::power(cfg.r_e, 2 * k + 1) * bracket / den;
  return m;
}

namespace {

using Matrix4 = Eigen::Matrix<cdouble, 4, 4>;
using Vector4 = Eigen::Matrix<cdouble, 4, 1>;

// Unknowns (a, b, c r_i^{-2k-1}, d r_e^{-2k-1}); rows are continuity and flux
// at r_i, then at r_e, each divided by the natural power of its radius.
void interface_system(const LayeredConfig& cfg, int k, Matrix4& m, Vector4& rhs) {
  const cdouble ec = cfg.core_eff();
  const cdouble es = cfg.shell_eff();
  const cdouble em = cfg.matrix_eff();
  const double kd = k;
  const double rp = ScaledComplex::power(cfg.rho(), 2 * k + 1).real();
  m.setZero();
  rhs.setZero();
  m(0, 0) = 1.0;
  m(0, 1) = -1.0;
  m(0, 2) = -1.0;
  m(1, 0) = ec * kd;
  m(1, 1) = -es * kd;
  m(1, 2) = es * (kd + 1.0);
  m(2, 1) = 1.0;
  m(2, 2) = rp;
  m(2, 3) = -1.0;
  rhs(2) = 1.0;
  m(3, 1) = es * kd;
  m(3, 2) = -es * (kd + 1.0) * rp;
  m(3, 3) = em * (kd + 1.0);
  rhs(3) = em * kd;
}

Vector4 scaled_unknowns(const LayeredConfig& cfg, const ModeCoefficients& x) {
  const int k = x.k;
  Vector4 v;
  v(0) = x.a.to_complex();
  v(1) = x.b.to_complex();
  v(2) = (x.c / ScaledComplex::power(cfg.r_i, 2 * k + 1)).to_complex();
  v(3) = (x.d / ScaledComplex::power(cfg.r_e, 2 * k + 1)).to_complex();
  return v;
}

}  // namespace

std::pair<ModeCoefficients, ModeDiagnostics> solve_mode_general(const LayeredConfig& cfg, int k) {
  check_degree(cfg, k);
  Matrix4 m;
  Vector4 rhs;
  interface_system(cfg, k, m, rhs);

  // row equilibration so rcond reflects the problem rather than units
  for (int i = 0; i < 4; ++i) {
    const double s = m.row(i).cwiseAbs().maxCoeff();
    m.row(i) /= s;
    rhs(i) /= s;
  }
  const Eigen::PartialPivLU<Matrix4> lu(m);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    throw ModeSingularity(k, rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity(),
                          singular_message(k, "interface system is numerically singular"));
  }
  const Vector4 x = lu.solve(rhs);

  ModeCoefficients out;
  out.k = k;
  out.a = ScaledComplex(x(0));
  out.b = ScaledComplex(x(1));
  out.c = ScaledComplex(x(2)) * ScaledComplex::power(cfg.r_i, 2 * k + 1);
  out.d = ScaledComplex(x(3)) * ScaledComplex::power(cfg.r_e, 2 * k + 1);

  ModeDiagnostics diag;
  diag.denominator = denominator_parts(cfg, k).value;
  diag.residual = transmission_residual(cfg, out);
  diag.condition = 1.0 / rcond;
  return {out, diag};
}

double transmission_residual(const LayeredConfig& cfg, const ModeCoefficients& x) {
  check_degree(cfg, x.k);
  Matrix4 m;
  Vector4 rhs;
  interface_system(cfg, x.k, m, rhs);
  const Vector4 v = scaled_unknowns(cfg, x);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    cdouble lhs = 0.0;
    double size = std::abs(rhs(i));
    for (int j = 0; j < 4; ++j) {
      lhs += m(i, j) * v(j);
      size += std::abs(m(i, j) * v(j));
    }
    if (size > 0.0) worst = std::max(worst, std::abs(lhs - rhs(i)) / size);
  }
  return worst;
}

double coefficient_distance(const LayeredConfig& cfg, const ModeCoefficients& x,
                            const ModeCoefficients& y, double floor) {
  if (x.k != y.k) throw DomainError("coefficient_distance: degree mismatch");
  const Vector4 u = scaled_unknowns(cfg, x);
  const Vector4 v = scaled_unknowns(cfg, y);
  const double big = std::max(u.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double s = std::max({std::abs(u(i)), std::abs(v(i)), floor * big});
    if (s > 0.0) worst = std::max(worst, std::abs(u(i) - v(i)) / s);
  }
  return worst;
}

RadialProfile mode_profile(const LayeredConfig& cfg, const ModeCoefficients& m, double q) {
  if (!(q > cfg.r_e)) throw DomainError("mode_profile: source radius must exceed r_e");
  const double inf = std::numeric_limits<double>::infinity();
  const ScaledComplex outer = ScaledComplex::power(q, 2 * m.k + 1) + m.d;
  std::vector<RadialPiece> pieces{
      {0.0, cfg.r_i, cfg.core_eff(), m.a, {}},
      {cfg.r_i, cfg.r_e, cfg.shell_eff(), m.b, m.c},
      {cfg.r_e, q, cfg.matrix_eff(), ScaledComplex(1.0), m.d},
      {q, inf, cfg.matrix_eff(), {}, outer},
  };
  return {m.k, std::move(pieces)};
}

}  // namespace calr
