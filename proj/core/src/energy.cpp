#include "calr/energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "calr/errors.hpp"

namespace calr {

namespace {

// Tail summation stops once a term is this small relative to the running total.
constexpr double kTailTolerance = 1e-17;
constexpr int kTailMaxExtraDegrees = 5000;
// The envelope series counts as divergent (bound = inf) when its terms fail
// to halve over this many degrees.
constexpr int kTailDecayWindow = 32;

}  // namespace

ScaledComplex mode_loss_energy(const LayeredConfig& cfg, int k, double q) {
  const ModeCoefficients m = solve_mode_closed_form(cfg, k);
  if (cfg.loss_region == LossRegion::Shell) return mode_shell_energy(k, m.b, m.c, cfg.r_i, cfg.r_e);
  return mode_profile(cfg, m, q).dirichlet_energy();
}

EnergyBreakdown dissipated_energy(const LayeredConfig& cfg, const SourceSpectrum& src) {
  cfg.validate();
  const double q = src.support_radius();
  if (!(q > cfg.r_e)) throw DomainError("dissipated_energy: source support radius must exceed r_e");

  EnergyBreakdown out;
  out.eta = cfg.eta;
  const ScaledComplex half_eta(0.5 * cfg.eta);
  double envelope = 0.0;
  for (int k : src.degrees()) {
    const double power = src.beta_power(k);
    const ScaledComplex contribution = half_eta * ScaledComplex(power) * mode_loss_energy(cfg, k, q);
    out.per_mode[k] = contribution;
    out.total += contribution;
    envelope = std::max(envelope, (ScaledComplex(power) * ScaledComplex::power(q, 2 * k)).real());
  }

  if (envelope == 0.0 || cfg.eta == 0.0) return out;
  // Degrees past the truncation, with sum_l |beta_k^l|^2 <= envelope * q^{-2k}.
  ScaledComplex tail;
  const ScaledComplex scale = half_eta * ScaledComplex(envelope);
  bool converged = false;
  std::vector<ScaledComplex> terms;
  for (int j = 0; j < kTailMaxExtraDegrees; ++j) {
    const int k = src.k_max() + 1 + j;
    ScaledComplex term;
    try {
      term = scale * ScaledComplex::power(q, -2 * k) * mode_loss_energy(cfg, k, q);
    } catch (const ModeSingularity&) {
      break;
    }
    tail += term;
    terms.push_back(term);
    if (j >= 8 && real_less(term, (out.total + tail) * ScaledComplex(kTailTolerance))) {
      converged = true;
      break;
    }
    if (j >= 2 * kTailDecayWindow && !real_less(term, terms[j - kTailDecayWindow] * ScaledComplex(0.5))) break;
  }
  out.tail_bound = converged ? tail.real() : std::numeric_limits<double>::infinity();
  return out;
}

std::vector<std::pair<int, ScaledComplex>> top_modes(const EnergyBreakdown& e, std::size_t n) {
  std::vector<std::pair<int, ScaledComplex>> all(e.per_mode.begin(), e.per_mode.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& x, const auto& y) { return real_less(y.second, x.second); });
  if (all.size() > n) all.resize(n);
  return all;
}

namespace {

double rule_base(const LayeredConfig& cfg, KRule rule) {
  return rule == KRule::ShellRule ? cfg.rho() : 1.0 / cfg.r_e;
}

}  // namespace

KSelection select_k_of_eta(double eta, const LayeredConfig& cfg, KRule rule) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("select_k_of_eta: eta must be positive");
  const double base = rule_base(cfg, rule);
  if (!(base > 0.0 && base < 1.0)) throw DomainError("select_k_of_eta: band base must lie in (0, 1)");
  if (eta > 1.0) return {1, true};

  // band k is base^k < eta <= base^{k-1}, i.e. k - 1 <= ln(eta)/ln(base) < k
  const double x = std::log(eta) / std::log(base);
  int k = static_cast<int>(std::floor(x)) + 1;
  // repair rounding at the band edges
  while (k > 1 && !(eta <= std::pow(base, k - 1))) --k;
  while (!(std::pow(base, k) < eta)) ++k;
  return {std::max(k, 1), false};
}

double critical_radius(const LayeredConfig& cfg) { return std::sqrt(cfg.r_e * cfg.r_e * cfg.r_e / cfg.r_i); }

std::string to_string(MaterialKind kind) {
  switch (kind) {
    case MaterialKind::Given: return "Given";
    case MaterialKind::Standard: return "Standard";
    case MaterialKind::Coreless: return "Coreless";
    case MaterialKind::PlasmonicShell: return "PlasmonicShell";
  }
  return "?";
}

LayeredConfig materials_at(const SweepTemplate& tpl, int k0, double eta) {
  if (k0 < 1) throw DomainError("materials_at: coupling degree must be >= 1");
  LayeredConfig cfg = tpl.base;
  cfg.eta = eta;
  const double plasmon = -1.0 - 1.0 / k0;
  switch (tpl.materials) {
    case MaterialKind::Given:
      break;
    case MaterialKind::Standard:
      cfg.eps_c = 1.0;
      cfg.eps_s = -1.0;
      break;
    case MaterialKind::Coreless:
      cfg.eps_c = plasmon;
      cfg.eps_s = plasmon;
      break;
    case MaterialKind::PlasmonicShell:
      if (cfg.loss_region == LossRegion::Shell) cfg.eps_c = plasmon * plasmon;
      cfg.eps_s = plasmon;
      break;
  }
  return cfg;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Blowup: return "Blowup";
    case Verdict::Bounded: return "Bounded";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

void classify_sweep(EnergySweep& sweep) {
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    const auto& p = sweep.points[i];
    if (!p.ok() || p.total.is_zero()) continue;
    x.push_back(sweep.abscissa[i]);
    y.push_back(p.total.log_abs());
  }
  sweep.growth_fit = {};
  sweep.verdict = Verdict::Inconclusive;
  const std::size_t n = x.size();
  if (n < 3) {
    // identically vanishing energy (no loss or no coupling) is bounded
    const bool all_zero = std::all_of(sweep.points.begin(), sweep.points.end(),
                                      [](const EnergyBreakdown& p) { return !p.ok() || p.total.is_zero(); });
    const bool any_ok = std::any_of(sweep.points.begin(), sweep.points.end(),
                                    [](const EnergyBreakdown& p) { return p.ok(); });
    if (all_zero && any_ok) sweep.verdict = Verdict::Bounded;
    return;
  }

  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return;
  GrowthFit& fit = sweep.growth_fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.used_points = n;

  const std::size_t third = n / 3;
  bool increasing = true;
  for (std::size_t i = third + 1; i < n; ++i) increasing = increasing && y[i] > y[i - 1];
  if (increasing && fit.slope > 0.0 && fit.residual < 0.2) {
    sweep.verdict = Verdict::Blowup;
    return;
  }
  const std::size_t split = n - std::max<std::size_t>(third, 1);
  const double early = *std::max_element(y.begin(), y.begin() + split);
  const double late = *std::max_element(y.begin() + split, y.end());
  if (fit.slope <= 0.0 || late <= early) sweep.verdict = Verdict::Bounded;
}

EnergySweep eta_sweep(const SweepTemplate& tpl, const SourceSpectrum& src, const std::vector<double>& etas,
                      Coupling coupling, int threads) {
  if (etas.empty()) throw DomainError("eta_sweep: empty eta grid");
  for (std::size_t i = 0; i < etas.size(); ++i) {
    // eta = 0 (lossless) is allowed; it dissipates nothing and is left out of the fit
    if (!(etas[i] >= 0.0) || !std::isfinite(etas[i])) throw DomainError("eta_sweep: eta values must be >= 0");
    if (i > 0 && !(etas[i] < etas[i - 1])) throw DomainError("eta_sweep: eta grid must be strictly decreasing");
  }
  tpl.base.validate();
  if (coupling.mode == Coupling::Mode::FixedK && coupling.k0 < 1) {
    throw DomainError("eta_sweep: fixed coupling degree must be >= 1");
  }

  EnergySweep sweep;
  sweep.points.resize(etas.size());
  sweep.abscissa.resize(etas.size());

  const KRule fit_rule = coupling.mode == Coupling::Mode::Adaptive
                             ? coupling.rule
                             : (tpl.base.loss_region == LossRegion::Shell || tpl.base.r_e <= 1.0 ? KRule::ShellRule
                                                                                                 : KRule::WholeSpaceRule);
  const double log_base = std::log(rule_base(tpl.base, fit_rule));

  auto compute = [&](std::size_t i) {
    const double eta = etas[i];
    EnergyBreakdown& point = sweep.points[i];
    std::optional<int> k_eta;
    int k0 = coupling.k0;
    if (coupling.mode == Coupling::Mode::Adaptive) {
      k0 = select_k_of_eta(eta, tpl.base, coupling.rule).k;
      k_eta = k0;
      sweep.abscissa[i] = k0;
    } else {
      sweep.abscissa[i] = std::log(eta) / log_base;
    }
    try {
      point = dissipated_energy(materials_at(tpl, k0, eta), src);
    } catch (const ModeSingularity& e) {
      point = {};
      point.eta = eta;
      point.status = e.what();
    }
    point.k_eta = k_eta;
  };

  const int workers = std::clamp(threads, 1, static_cast<int>(etas.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < etas.size(); ++i) compute(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < etas.size(); i = next++) compute(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  classify_sweep(sweep);
  return sweep;
}

std::string to_string(SourceClass c) {
  switch (c) {
    case SourceClass::InsideCritical: return "InsideCritical";
    case SourceClass::OutsideCritical: return "OutsideCritical";
    case SourceClass::GrowthOK: return "GrowthOK";
    case SourceClass::GrowthFails: return "GrowthFails";
  }
  return "?";
}

namespace {

double upper_half_slope(const std::vector<std::pair<int, double>>& logs) {
  const std::size_t start = logs.size() / 2;
  const std::size_t n = logs.size() - start;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = start; i < logs.size(); ++i) {
    mx += logs[i].first;
    my += logs[i].second;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = start; i < logs.size(); ++i) {
    sxx += (logs[i].first - mx) * (logs[i].first - mx);
    sxy += (logs[i].first - mx) * (logs[i].second - my);
  }
  return sxy / sxx;
}

}  // namespace

SourceClass classify_source(const SourceSpectrum& src, const LayeredConfig& cfg) {
  return classify_source(src, cfg,
                         src.kind() == SourceKind::Multipole ? SourceTest::CriticalRadius : SourceTest::DensityGrowth);
}

SourceClass classify_source(const SourceSpectrum& src, const LayeredConfig& cfg, SourceTest test) {
  const std::vector<int> degrees = src.degrees();
  if (degrees.size() < 6) {
    std::ostringstream os;
    os << "classify_source: " << degrees.size() << " nonzero degrees, need at least 6";
    throw InconclusiveError(os.str());
  }
  const double q = src.support_radius();
  std::vector<std::pair<int, double>> logs;
  if (test == SourceTest::CriticalRadius) {
    for (int k : degrees) {
      double sum = 0.0;
      for (const auto& [l, beta] : src.degree_coefficients(k, SourceKind::Multipole)) sum += std::abs(beta);
      logs.emplace_back(k, std::log(sum));
    }
    const double rate = upper_half_slope(logs);
    return rate > -std::log(critical_radius(cfg)) ? SourceClass::InsideCritical : SourceClass::OutsideCritical;
  }
  const double log_ratio = std::log(cfg.r_e * cfg.r_e * cfg.r_e / (q * q));
  for (int k : degrees) {
    logs.emplace_back(k, std::log(src.alpha_power(k)) + k * log_ratio - std::log(static_cast<double>(k)));
  }
  return upper_half_slope(logs) > 0.0 ? SourceClass::GrowthOK : SourceClass::GrowthFails;
}

}  // namespace calr
