#include "calr/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "calr/errors.hpp"
#include "calr/harmonics.hpp"

namespace calr {

FieldEvaluator::FieldEvaluator(const LayeredConfig& cfg, const SourceSpectrum& src) : cfg_(cfg), src_(src) {
  cfg_.validate();
  if (!(src_.support_radius() > cfg_.r_e)) throw DomainError("FieldEvaluator: source radius must exceed r_e");
  for (int k : src_.degrees()) {
    const auto& m = modes_.emplace(k, solve_mode_closed_form(cfg_, k)).first->second;
    profiles_.emplace(k, mode_profile(cfg_, m, src_.support_radius()));
  }
}

FieldSample FieldEvaluator::sample(const FieldPoint& x, Side side) const {
  const double q = src_.support_radius();
  if (!(x.r > 0.0) || !std::isfinite(x.r)) throw DomainError("eval_field: need 0 < r < inf");
  if (x.r == q) throw DomainError("eval_field: the field has a kink on the source sphere |x| = q");

  FieldSample s;
  s.point = x;
  const bool device = x.r < cfg_.r_e || (x.r == cfg_.r_e && side == Side::Inner);
  for (const auto& [k, m] : modes_) {
    const RadialProfile& u = profiles_.at(k);
    const ScaledComplex ru = u.value(x.r, side);
    const ScaledComplex rf =
        x.r < q ? ScaledComplex::power(x.r, k) : ScaledComplex::power(q, 2 * k + 1) * ScaledComplex::power(x.r, -k - 1);
    // outside the device u - F is exactly d r^{-k-1}
    const ScaledComplex ra = device ? ru - rf : m.d * ScaledComplex::power(x.r, -k - 1);
    for (const auto& [l, beta] : src_.degree_coefficients(k, SourceKind::Multipole)) {
      const cdouble y = beta * eval_harmonic({k, l}, x.theta, x.phi);
      s.value += ru.to_complex() * y;
      s.newtonian += rf.to_complex() * y;
      s.anomaly += ra.to_complex() * y;
    }
  }
  return s;
}

FieldSample eval_field(const LayeredConfig& cfg, const SourceSpectrum& src, const FieldPoint& x) {
  return FieldEvaluator(cfg, src).sample(x);
}

double default_probe_radius(const LayeredConfig& cfg, double q) {
  return std::max(1.05 * critical_radius(cfg), 1.05 * q);
}

std::vector<FieldPoint> probe_ring(double radius, int n) {
  std::vector<FieldPoint> ring;
  ring.reserve(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * std::numbers::pi * j / n;
    if (t <= std::numbers::pi) {
      ring.push_back({radius, t, 0.0});
    } else {
      ring.push_back({radius, 2.0 * std::numbers::pi - t, std::numbers::pi});
    }
  }
  return ring;
}

std::string to_string(DiagnosticTrend t) {
  switch (t) {
    case DiagnosticTrend::Vanishing: return "Vanishing";
    case DiagnosticTrend::NotVanishing: return "NotVanishing";
    case DiagnosticTrend::Undefined: return "Undefined";
  }
  return "?";
}

CalrDiagnostic calr_diagnostic(const SweepTemplate& tpl, const SourceSpectrum& src, const std::vector<double>& etas,
                               Coupling coupling, std::optional<double> probe_radius, int threads) {
  CalrDiagnostic out;
  out.probe_radius = probe_radius.value_or(default_probe_radius(tpl.base, src.support_radius()));
  if (!(out.probe_radius > tpl.base.r_e)) throw DomainError("calr_diagnostic: probe radius must exceed r_e");
  if (out.probe_radius == src.support_radius()) {
    throw DomainError("calr_diagnostic: probe sphere coincides with the source sphere");
  }

  const EnergySweep sweep = eta_sweep(tpl, src, etas, coupling, threads);
  out.energy_verdict = sweep.verdict;
  const std::vector<FieldPoint> ring = probe_ring(out.probe_radius);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (const auto& p : sweep.points) {
    DiagnosticPoint d;
    d.eta = p.eta;
    d.k_eta = p.k_eta;
    d.energy = p.total.real();
    d.ratio = nan;
    if (!p.ok()) {
      d.status = p.status;
    } else if (p.total.is_zero()) {
      d.status = "zero dissipated energy; normalized field undefined";
    } else {
      const int k0 = coupling.mode == Coupling::Mode::Adaptive ? *p.k_eta : coupling.k0;
      const FieldEvaluator field(materials_at(tpl, k0, p.eta), src);
      double sup = 0.0;
      for (const auto& x : ring) sup = std::max(sup, std::abs(field.sample(x).value));
      d.ratio = (ScaledComplex(sup) / p.total.sqrt()).real();
    }
    out.points.push_back(d);
  }

  std::vector<double> defined;
  for (const auto& d : out.points) {
    if (d.status.empty()) defined.push_back(d.ratio);
  }
  if (defined.size() >= 5) {
    bool decreasing = true;
    for (std::size_t i = defined.size() - 4; i < defined.size(); ++i) {
      decreasing = decreasing && defined[i] < defined[i - 1];
    }
    out.trend = decreasing ? DiagnosticTrend::Vanishing : DiagnosticTrend::NotVanishing;
  }
  return out;
}

}  // namespace calr
