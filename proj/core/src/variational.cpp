#include "calr/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "calr/energy.hpp"
#include "calr/errors.hpp"

namespace calr {

namespace {

constexpr double kMaterialTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

ScaledComplex pw(double base, std::int64_t n) { return ScaledComplex::power(base, n); }

bool near(cdouble a, cdouble b) { return std::abs(a - b) <= kMaterialTol * std::max(1.0, std::abs(b)); }

void require(bool ok, const std::string& what) {
  if (!ok) throw PreconditionError(what);
}

// The structure rescaled to a unit core: r_e' = r_e / r_i, q' = q / r_i.
struct Normalized {
  double r_i;
  double r_e;
  double q;
};

Normalized normalize(const LayeredConfig& cfg, const SourceSpectrum& src) {
  cfg.validate();
  const double q = src.support_radius();
  require(q > cfg.r_e, "variational bounds need the source outside the device (q > r_e)");
  require(src.is_real_valued(), "variational bounds need a real-valued source (conjugate-symmetric spectrum)");
  return {cfg.r_i, cfg.r_e / cfg.r_i, q / cfg.r_i};
}

void require_whole_space(const LayeredConfig& cfg, const char* who) {
  require(cfg.loss_region == LossRegion::WholeSpace,
          std::string(who) + ": the structure must carry its loss in all of space");
  require(near(cfg.eps_m, 1.0), std::string(who) + ": matrix permittivity must be 1");
}

double eps_for(int k) { return -1.0 - 1.0 / k; }

// The degree-k coupling index encoded in eps_s = -1 - 1/k, or 0.
int degree_from_shell(cdouble eps_s) {
  if (std::abs(eps_s.imag()) > kMaterialTol || !(eps_s.real() < -1.0)) return 0;
  const double k = -1.0 / (eps_s.real() + 1.0);
  const long kr = std::lround(k);
  if (kr < 1 || std::abs(k - kr) > 1e-9 * k) return 0;
  return static_cast<int>(kr);
}

}  // namespace

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::PsiHat: return "PsiHat";
    case FamilyKind::VHatNR1: return "VHatNR1";
    case FamilyKind::VHatCRC: return "VHatCRC";
    case FamilyKind::VTilde: return "VTilde";
  }
  return "?";
}

std::string to_string(CrcMode mode) { return mode == CrcMode::FixedK0 ? "FixedK0" : "AdaptiveK"; }

double psi_hat_energy(int k, double r_e) {
  if (k < 1 || !(r_e > 0.0)) throw DomainError("psi_hat_energy: need k >= 1 and r_e > 0");
  return (ScaledComplex(2.0 * k + 1.0) * pw(r_e, 2 * k + 1)).real();
}

RadialProfile psi_hat_profile(int k, double r_e) {
  if (k < 1 || !(r_e > 0.0)) throw DomainError("psi_hat_profile: need k >= 1 and r_e > 0");
  return {k,
          {{0.0, r_e, eps_for(k), ScaledComplex(1.0), {}},
           {r_e, kInf, 1.0, {}, pw(r_e, 2 * k + 1)}}};
}

double psi_hat_jump_pairing(int k, double r_e) {
  const RadialProfile p = psi_hat_profile(k, r_e);
  const ScaledComplex jump = p.derivative(r_e, Side::Outer) - p.derivative(r_e, Side::Inner);
  return (-(p.value(r_e).conj() * jump) * ScaledComplex(r_e * r_e)).real();
}

RadialProfile nr1_profile(int k, double r_e, double q) {
  if (k < 1 || !(r_e > 1.0) || !(q > r_e)) throw DomainError("nr1_profile: need k >= 1 and 1 < r_e < q");
  const double kd = k;
  const double n2 = (2.0 * kd + 1.0) * (2.0 * kd + 1.0);
  const ScaledComplex re_n = pw(r_e, 2 * k + 1);
  const ScaledComplex re_inv = pw(r_e, -(2 * k + 1));
  // (4k + 4k^2 + r_e^{2k+1}) / (r_e^{2k+1} (2k+1)^2)
  const ScaledComplex p = (ScaledComplex(4.0 * kd * (kd + 1.0)) * re_inv + ScaledComplex(1.0)) / ScaledComplex(n2);
  // 2k (r_e^{2k+1} - 1) / (2k+1)^2
  const ScaledComplex qq = ScaledComplex(2.0 * kd / n2) * (re_n - ScaledComplex(1.0));
  // (q^{2k+1} (1 + 4k(k+1) r_e^{-2k-1}) + 2k (r_e^{2k+1} - 1)) / (2k+1)^2
  const ScaledComplex g =
      (pw(q, 2 * k + 1) * (ScaledComplex(1.0) + ScaledComplex(4.0 * kd * (kd + 1.0)) * re_inv) +
       ScaledComplex(2.0 * kd) * (re_n - ScaledComplex(1.0))) /
      ScaledComplex(n2);
  return {k,
          {{0.0, 1.0, 1.0, ScaledComplex(1.0), {}},
           {1.0, r_e, -1.0, ScaledComplex(1.0 / (2.0 * kd + 1.0)), ScaledComplex(2.0 * kd / (2.0 * kd + 1.0))},
           {r_e, q, 1.0, p, qq},
           {q, kInf, 1.0, {}, g}}};
}

cdouble nr1_lambda(cdouble alpha, int k, double r_e, double q) {
  // -alpha (2k+1) q r_e / (4k(k+1) + r_e^{2k+1}) q^{-k} r_e^{2k}
  const double kd = k;
  const ScaledComplex den = ScaledComplex(4.0 * kd * (kd + 1.0)) * pw(r_e, -(2 * k + 1)) + ScaledComplex(1.0);
  return (ScaledComplex(-alpha * (2.0 * kd + 1.0)) * pw(q, 1 - k) / den).to_complex();
}

RadialProfile crc_profile(int k, int k_ref, double r_e, double q) {
  if (k < 1 || k_ref < 1 || !(r_e > 1.0) || !(q > r_e)) {
    throw DomainError("crc_profile: need k, k_ref >= 1 and 1 < r_e < q");
  }
  const double kd = k;
  const double K = k_ref;
  const double n2 = (2.0 * kd + 1.0) * (2.0 * kd + 1.0);
  const double den = n2 * K * (K + 1.0);
  const double kk = kd * (kd + 1.0);
  const double m = (2.0 * K + 1.0) * (2.0 * K + 1.0);
  const ScaledComplex re_n = pw(r_e, 2 * k + 1);
  const ScaledComplex re_inv = pw(r_e, -(2 * k + 1));
  const ScaledComplex q_n = pw(q, 2 * k + 1);

  const double shell_grow = (1.0 + kd + K) / ((1.0 + 2.0 * kd) * (1.0 + K));
  const double shell_decay = (kd + 2.0 * kd * K) / ((1.0 + 2.0 * kd) * (1.0 + K));
  // r_e^{-2k-1} ((-k(k+1) + K^2 + K) r_e^{2k+1} + k(k+1)(2K+1)^2) / den
  const ScaledComplex p = (ScaledComplex(K * K + K - kk) + ScaledComplex(kk * m) * re_inv) / ScaledComplex(den);
  // k (2K+1)(k+K+1)(r_e^{2k+1} - 1) / den
  const ScaledComplex qq =
      ScaledComplex(kd * (2.0 * K + 1.0) * (kd + K + 1.0) / den) * (re_n - ScaledComplex(1.0));
  // r_e^{-2k-1} [ -(k+K+1) r_e^{2k+1} ((k-K) q^{2k+1} + 2kK + k) + k(k+1)(2K+1)^2 q^{2k+1}
  //              + k(2K+1)(k+K+1) r_e^{4k+2} ] / den
  const ScaledComplex g =
      (ScaledComplex(-(kd + K + 1.0)) * (ScaledComplex(kd - K) * q_n + ScaledComplex(2.0 * kd * K + kd)) +
       ScaledComplex(kk * m) * q_n * re_inv + ScaledComplex(kd * (2.0 * K + 1.0) * (kd + K + 1.0)) * re_n) /
      ScaledComplex(den);
  return {k,
          {{0.0, 1.0, 1.0, ScaledComplex(1.0), {}},
           {1.0, r_e, eps_for(k_ref), ScaledComplex(shell_grow), ScaledComplex(shell_decay)},
           {r_e, q, 1.0, p, qq},
           {q, kInf, 1.0, {}, g}}};
}

cdouble crc_lambda(cdouble alpha, int k, int k_ref, double r_e, double q) {
  // alpha (2k+1) K (K+1) / (q^{k-1} r_e^{-2k-1} ((k-K)(k+K+1) r_e^{2k+1} - k(k+1)(2K+1)^2))
  const double kd = k;
  const double K = k_ref;
  const ScaledComplex den = ScaledComplex((kd - K) * (kd + K + 1.0)) -
                            ScaledComplex(kd * (kd + 1.0) * (2.0 * K + 1.0) * (2.0 * K + 1.0)) * pw(r_e, -(2 * k + 1));
  return (ScaledComplex(alpha * ((2.0 * kd + 1.0) * K * (K + 1.0))) * pw(q, 1 - k) / den).to_complex();
}

RadialProfile vtilde_profile(int k, double r_e, double q) {
  if (k < 1 || !(r_e > 1.0) || !(q > r_e)) throw DomainError("vtilde_profile: need k >= 1 and 1 < r_e < q");
  return {k,
          {{0.0, 1.0, 1.0, ScaledComplex(1.0), {}},
           {1.0, r_e, eps_for(k), ScaledComplex(1.0), {}},
           {r_e, q, 1.0, ScaledComplex(1.0), {}},
           {q, kInf, 1.0, {}, pw(q, 2 * k + 1)}}};
}

cdouble vtilde_lambda(cdouble alpha, int k, double q) {
  return -alpha * std::pow(q, 1 - k) / (2.0 * k + 1.0);
}

namespace {

// Constraint residual of lambda * v - w against the density alpha on |x| = q:
// lambda [eps dv/dr]_a - [dw/dr]_a = (a == q ? alpha : 0) at every interface,
// plus continuity of v and w.
double constraint_residual(const RadialProfile& v, cdouble lambda, const RadialProfile* w, cdouble alpha,
                           double q) {
  std::vector<double> radii = v.interfaces();
  if (w != nullptr) {
    for (double a : w->interfaces()) radii.push_back(a);
  }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const ScaledComplex lam(lambda);
  double worst = 0.0;
  for (double a : radii) {
    worst = std::max(worst, v.continuity_residual(a));
    ScaledComplex jump = lam * v.flux_jump(a);
    ScaledComplex scale = (lam * v.flux(a, Side::Inner)).abs() + (lam * v.flux(a, Side::Outer)).abs();
    if (w != nullptr) {
      worst = std::max(worst, w->continuity_residual(a));
      jump -= w->flux_jump(a);
      scale += w->flux(a, Side::Inner).abs() + w->flux(a, Side::Outer).abs();
    }
    const cdouble target = a == q ? alpha : cdouble{};
    scale += ScaledComplex(std::abs(target));
    if (scale.is_zero()) continue;
    worst = std::max(worst, ((jump - ScaledComplex(target)).abs() / scale).real());
  }
  return worst;
}

}  // namespace

double primal_constraint_residual(const RadialProfile& p, cdouble lambda, cdouble alpha, double q) {
  return constraint_residual(p, lambda, nullptr, alpha, q);
}

BoundReport primal_bound_nr1(const LayeredConfig& cfg, const SourceSpectrum& src, double eta) {
  require_whole_space(cfg, "primal_bound_nr1");
  require(near(cfg.eps_c, 1.0) && near(cfg.eps_s, -1.0),
          "primal_bound_nr1: needs the standard structure eps_c = 1, eps_s = -1");
  if (!(eta >= 0.0)) throw DomainError("primal_bound_nr1: eta must be >= 0");
  const Normalized n = normalize(cfg, src);

  ScaledComplex v_energy;
  double residual = 0.0;
  cdouble first_lambda{};
  for (int k : src.degrees()) {
    const RadialProfile p = nr1_profile(k, n.r_e, n.q);
    const ScaledComplex e = p.dirichlet_energy();
    for (const auto& [l, alpha] : src.degree_coefficients(k, SourceKind::DeltaShell)) {
      const cdouble a = n.r_i * alpha;
      const cdouble lam = nr1_lambda(a, k, n.r_e, n.q);
      if (first_lambda == cdouble{}) first_lambda = lam;
      v_energy += ScaledComplex(std::norm(lam)) * e;
      residual = std::max(residual, primal_constraint_residual(p, lam, a, n.q));
    }
  }

  BoundReport r;
  r.eta = eta;
  r.parts["v-energy"] = (ScaledComplex(0.5 * eta * n.r_i) * v_energy).real();
  r.parts["w-energy"] = 0.0;
  r.value = r.parts["v-energy"];
  r.family = {FamilyKind::VHatNR1, src.degrees().empty() ? 1 : src.degrees().front(), first_lambda, 0,
              FamilyPart::Re};
  r.diagnostics["constraint-residual"] = residual;
  return r;
}

namespace {

struct DualChoice {
  int order = 0;
  FamilyPart part = FamilyPart::Re;
  // Re or Im of the (rescaled) density coefficient
  double coefficient = 0.0;
  // energy weight of Re/Im(conj Y): 1 for l = 0, 1/2 otherwise
  double weight = 1.0;
};

// Best (order, part) for a degree-k dual family: largest coefficient^2 / weight.
DualChoice choose_dual_family(const SourceSpectrum& src, int k, double alpha_scale,
                              std::optional<FamilyPart> part) {
  DualChoice best;
  double best_score = -1.0;
  for (int l = 0; l <= k; ++l) {
    const cdouble a = alpha_scale * src.alpha({k, l});
    const double w = l == 0 ? 1.0 : 0.5;
    for (FamilyPart pt : {FamilyPart::Re, FamilyPart::Im}) {
      if (part && *part != pt) continue;
      if (l == 0 && pt == FamilyPart::Im) continue;  // Im conj(Y_k^0) vanishes
      const double c = pt == FamilyPart::Re ? a.real() : a.imag();
      const double score = c * c / w;
      if (score > best_score) {
        best_score = score;
        best = {l, pt, c, w};
      }
    }
  }
  if (!(best_score > 0.0)) {
    std::ostringstream os;
    os << "degree " << k << " density coefficient has a vanishing ";
    if (part && *part == FamilyPart::Re) {
      os << "real part; use the imaginary-part family";
    } else if (part) {
      os << "imaginary part; use the real-part family";
    } else {
      os << "value; the dual family needs a nonzero coefficient";
    }
    throw PreconditionError(os.str());
  }
  return best;
}

}  // namespace

BoundReport dual_bound_r1(const LayeredConfig& cfg, const SourceSpectrum& src, int k0, double lambda,
                          std::optional<FamilyPart> part) {
  if (k0 < 1) throw DomainError("dual_bound_r1: k0 must be >= 1");
  cfg.validate();
  require_whole_space(cfg, "dual_bound_r1");
  require(near(cfg.eps_s, eps_for(k0)) && near(cfg.eps_c, cfg.eps_s),
          "dual_bound_r1: needs the coreless structure eps_c = eps_s = -1 - 1/k0");
  const double q = src.support_radius();
  require(q > cfg.r_e, "dual_bound_r1: needs q > r_e");
  require(src.is_real_valued(), "dual_bound_r1: needs a real-valued source");

  const DualChoice c = choose_dual_family(src, k0, 1.0, part);
  const double eta = cfg.eta;
  // pairing per unit lambda: coefficient * psi-hat(q) * q^2 = coefficient q^{1-k} r_e^{2k+1}
  const double p = (ScaledComplex(c.coefficient) * pw(q, 1 - k0) * pw(cfg.r_e, 2 * k0 + 1)).real();
  const double e = c.weight * psi_hat_energy(k0, cfg.r_e);

  BoundReport r;
  r.eta = eta;
  r.family = {FamilyKind::PsiHat, k0, lambda, c.order, c.part};
  r.parts["source-pairing"] = lambda * p;
  r.parts["psi-energy"] = 0.5 * eta * lambda * lambda * e;
  r.parts["v-energy"] = 0.0;
  r.value = r.parts["source-pairing"] - r.parts["psi-energy"];
  r.diagnostics["constraint-residual"] = psi_hat_profile(k0, cfg.r_e).flux_residual(cfg.r_e);
  if (eta > 0.0) {
    r.diagnostics["lambda-star"] = p / (eta * e);
    r.diagnostics["optimum"] = p * p / (2.0 * eta * e);
  }
  return r;
}

BoundReport dual_bound_r2(const LayeredConfig& cfg, const SourceSpectrum& src, double eta,
                          std::optional<double> lambda) {
  if (!(eta > 0.0)) throw DomainError("dual_bound_r2: eta must be positive");
  require_whole_space(cfg, "dual_bound_r2");
  require(std::abs(cfg.eps_c.imag()) <= kMaterialTol && cfg.eps_c.real() > 0.0,
          "dual_bound_r2: the core permittivity must be real and positive");
  const Normalized n = normalize(cfg, src);
  require(n.q < std::pow(n.r_e, 1.5), "dual_bound_r2: needs q < r_e^{3/2} (in units of r_i)");

  LayeredConfig unit = cfg;
  unit.r_i = 1.0;
  unit.r_e = n.r_e;
  const int K = select_k_of_eta(eta, unit, KRule::WholeSpaceRule).k;
  {
    std::ostringstream os;
    os << "dual_bound_r2: eps_s must be -1 - 1/k(eta) with k(eta) = " << K;
    require(near(cfg.eps_s, eps_for(K)), os.str());
  }

  const DualChoice c = choose_dual_family(src, K, n.r_i, std::nullopt);
  const double Kd = K;
  const double eps_c = cfg.eps_c.real();
  const double jump = Kd * (eps_for(K) - eps_c);  // flux jump of psi-hat at r = 1
  const double p = (ScaledComplex(c.coefficient) * pw(n.q, 1 - K) * pw(n.r_e, 2 * K + 1)).real();
  const double e_psi = c.weight * psi_hat_energy(K, n.r_e);
  // v = (jump / eta) / (2K+1) * (r^K inside 1, r^{-K-1} outside): energy (jump/eta)^2 / (2K+1)
  const double e_v_unit = c.weight * jump * jump / (eta * eta * (2.0 * Kd + 1.0));
  // J(lambda) = lambda p - lambda^2 Qc
  const double qc = 0.5 * eta * (e_psi + e_v_unit);
  const double lam = lambda.value_or(p / (2.0 * qc));

  BoundReport r;
  r.eta = eta;
  r.family = {FamilyKind::PsiHat, K, lam, c.order, c.part};
  r.parts["source-pairing"] = n.r_i * lam * p;
  r.parts["psi-energy"] = n.r_i * 0.5 * eta * lam * lam * e_psi;
  r.parts["v-energy"] = n.r_i * 0.5 * eta * lam * lam * e_v_unit;
  r.value = r.parts["source-pairing"] - r.parts["psi-energy"] - r.parts["v-energy"];

  // constants of the lower-bound chain fitted to this point:
  //   J >= lambda r_e^K [C~ a (r_e/q)^{K+1} - C lambda K]
  const double c_tilde = n.q * n.q;
  const double c_fit = qc / (Kd * std::pow(n.r_e, Kd));
  const double envelope = n.r_i / (4.0 * c_fit * Kd) * (c_tilde * c.coefficient) * (c_tilde * c.coefficient) *
                          std::pow(n.r_e / n.q, 2.0) * std::pow(n.r_e * n.r_e * n.r_e / (n.q * n.q), Kd);
  r.diagnostics["k-eta"] = Kd;
  r.diagnostics["lambda-star"] = p / (2.0 * qc);
  r.diagnostics["optimum"] = n.r_i * p * p / (4.0 * qc);
  r.diagnostics["C-tilde"] = c_tilde;
  r.diagnostics["C"] = c_fit;
  r.diagnostics["envelope"] = envelope;
  r.diagnostics["constraint-residual"] = psi_hat_profile(K, n.r_e).flux_residual(n.r_e);
  return r;
}

BoundReport primal_bound_crc(const LayeredConfig& cfg, const SourceSpectrum& src, double eta, CrcMode mode) {
  if (!(eta > 0.0)) throw DomainError("primal_bound_crc: eta must be positive");
  require_whole_space(cfg, "primal_bound_crc");
  require(near(cfg.eps_c, 1.0), "primal_bound_crc: needs eps_c = 1");
  const Normalized n = normalize(cfg, src);

  int k_ref = 0;
  if (mode == CrcMode::FixedK0) {
    k_ref = degree_from_shell(cfg.eps_s);
    require(k_ref > 0, "primal_bound_crc: FixedK0 needs eps_s = -1 - 1/k0 for a positive integer k0");
  } else {
    require(n.q > std::sqrt(n.r_e * n.r_e * n.r_e),
            "primal_bound_crc: AdaptiveK needs the source outside the critical radius (q > r*)");
    LayeredConfig unit = cfg;
    unit.r_i = 1.0;
    unit.r_e = n.r_e;
    k_ref = select_k_of_eta(eta, unit, KRule::WholeSpaceRule).k;
    std::ostringstream os;
    os << "primal_bound_crc: AdaptiveK needs eps_s = -1 - 1/k(eta) with k(eta) = " << k_ref;
    require(near(cfg.eps_s, eps_for(k_ref)), os.str());
  }

  ScaledComplex v_energy;
  ScaledComplex w_energy;
  double residual = 0.0;
  cdouble ref_lambda{};
  for (int k : src.degrees()) {
    const bool tilde = mode == CrcMode::AdaptiveK && k == k_ref;
    const RadialProfile p = tilde ? vtilde_profile(k, n.r_e, n.q) : crc_profile(k, k_ref, n.r_e, n.q);
    const ScaledComplex e = p.dirichlet_energy();
    for (const auto& [l, alpha] : src.degree_coefficients(k, SourceKind::DeltaShell)) {
      const cdouble a = n.r_i * alpha;
      const cdouble lam = tilde ? vtilde_lambda(a, k, n.q) : crc_lambda(a, k, k_ref, n.r_e, n.q);
      if (k == k_ref && l == 0) ref_lambda = lam;
      v_energy += ScaledComplex(std::norm(lam)) * e;
      if (!tilde) {
        residual = std::max(residual, primal_constraint_residual(p, lam, a, n.q));
        continue;
      }
      // -lap w = -lambda [eps dV/dr] on |x| = 1 and |x| = r_e
      const double Kd = k;
      const ScaledComplex s1 = -ScaledComplex(lam) * p.flux_jump(1.0);
      const ScaledComplex s2 = -ScaledComplex(lam) * p.flux_jump(n.r_e);
      // a density s on |x| = a gives s a/(2K+1) (r/a)^K inside and s a/(2K+1) (a/r)^{K+1} outside
      const ScaledComplex h1 = s1 / ScaledComplex(2.0 * Kd + 1.0);
      const ScaledComplex h2 = s2 * ScaledComplex(n.r_e / (2.0 * Kd + 1.0));
      const RadialProfile w(k, {{0.0, 1.0, 1.0, h1 + h2 * pw(n.r_e, -k), {}},
                                {1.0, n.r_e, 1.0, h2 * pw(n.r_e, -k), h1},
                                {n.r_e, kInf, 1.0, {}, h1 + h2 * pw(n.r_e, k + 1)}});
      w_energy += w.dirichlet_energy();
      residual = std::max(residual, constraint_residual(p, lam, &w, a, n.q));
    }
  }

  BoundReport r;
  r.eta = eta;
  r.family = {mode == CrcMode::AdaptiveK ? FamilyKind::VTilde : FamilyKind::VHatCRC, k_ref, ref_lambda, 0,
              FamilyPart::Re};
  r.parts["v-energy"] = (ScaledComplex(0.5 * eta * n.r_i) * v_energy).real();
  r.parts["w-energy"] = (ScaledComplex(n.r_i / (2.0 * eta)) * w_energy).real();
  r.value = r.parts["v-energy"] + r.parts["w-energy"];
  r.diagnostics["k-ref"] = k_ref;
  r.diagnostics["constraint-residual"] = residual;
  if (mode == CrcMode::AdaptiveK) {
    const double a2 = n.r_i * n.r_i * src.alpha_power(k_ref);
    if (a2 > 0.0) {
      const double rate = std::pow(std::pow(n.r_e, 1.5) / n.q, 2.0 * k_ref);
      r.diagnostics["w-envelope-C"] = (w_energy / ScaledComplex(eta)).real() / (a2 * rate);
    }
  }
  return r;
}

}  // namespace calr
