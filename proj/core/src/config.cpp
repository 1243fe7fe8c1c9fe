#include "calr/config.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "calr/errors.hpp"

namespace calr {

std::string_view to_string(LossRegion region) {
  return region == LossRegion::Shell ? "Shell" : "WholeSpace";
}

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::DeltaShell ? "DeltaShell" : "Multipole";
}

cdouble LayeredConfig::core_eff() const {
  return loss_region == LossRegion::WholeSpace ? eps_c + cdouble(0.0, eta) : eps_c;
}

cdouble LayeredConfig::shell_eff() const { return eps_s + cdouble(0.0, eta); }

cdouble LayeredConfig::matrix_eff() const {
  return loss_region == LossRegion::WholeSpace ? eps_m + cdouble(0.0, eta) : eps_m;
}

cdouble LayeredConfig::eps_at(double r) const {
  if (r <= r_i) return core_eff();
  if (r <= r_e) return shell_eff();
  return matrix_eff();
}

bool LayeredConfig::is_valid() const {
  return std::isfinite(r_i) && std::isfinite(r_e) && r_i > 0.0 && r_i < r_e && eta >= 0.0 &&
         std::isfinite(eta);
}

void LayeredConfig::validate() const {
  if (!(r_i > 0.0) || !std::isfinite(r_i)) throw DomainError("LayeredConfig: r_i must be positive");
  if (!(r_i < r_e) || !std::isfinite(r_e)) throw DomainError("LayeredConfig: need r_i < r_e");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw DomainError("LayeredConfig: eta must be >= 0");
}

cdouble density_to_multipole(cdouble alpha, int k, double q) {
  return -alpha * std::pow(q, 1 - k) / static_cast<double>(2 * k + 1);
}

cdouble multipole_to_density(cdouble beta, int k, double q) {
  return -beta * static_cast<double>(2 * k + 1) * std::pow(q, k - 1);
}

SourceSpectrum::SourceSpectrum(SourceKind kind, double support_radius, int k_max)
    : kind_(kind), q_(support_radius), k_max_(k_max) {
  if (!(support_radius > 0.0) || !std::isfinite(support_radius)) {
    throw DomainError("SourceSpectrum: support radius must be positive");
  }
  if (k_max < 1) throw DomainError("SourceSpectrum: k_max must be >= 1");
}

SourceSpectrum SourceSpectrum::zonal_geometric(SourceKind kind, double support_radius, double scale,
                                               int k_max, double amplitude) {
  if (!(scale > 0.0)) throw DomainError("zonal_geometric: scale must be positive");
  SourceSpectrum s(kind, support_radius, k_max);
  for (int k = 1; k <= k_max; ++k) s.set({k, 0}, amplitude * std::pow(scale, -k));
  return s;
}

SourceSpectrum SourceSpectrum::zonal_constant(SourceKind kind, double support_radius, cdouble value,
                                              int k_max) {
  SourceSpectrum s(kind, support_radius, k_max);
  for (int k = 1; k <= k_max; ++k) s.set({k, 0}, value);
  return s;
}

SourceSpectrum SourceSpectrum::single(SourceKind kind, double support_radius, ModeIndex m,
                                      cdouble value, int k_max) {
  SourceSpectrum s(kind, support_radius, std::max(k_max, m.k));
  s.set(m, value);
  return s;
}

void SourceSpectrum::set(ModeIndex m, cdouble value) {
  if (!m.valid()) throw DomainError("SourceSpectrum: invalid mode index");
  if (m.k == 0) {
    if (value != cdouble{}) throw DomainError("SourceSpectrum: source must have zero mean (k = 0)");
    return;
  }
  if (m.k > k_max_) {
    std::ostringstream os;
    os << "SourceSpectrum: degree " << m.k << " exceeds k_max " << k_max_;
    throw DomainError(os.str());
  }
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
    throw DomainError("SourceSpectrum: non-finite coefficient");
  }
  if (value == cdouble{}) {
    coeffs_.erase(m);
  } else {
    coeffs_[m] = value;
  }
}

cdouble SourceSpectrum::beta(ModeIndex m) const {
  const auto it = coeffs_.find(m);
  if (it == coeffs_.end()) return {};
  return kind_ == SourceKind::Multipole ? it->second : density_to_multipole(it->second, m.k, q_);
}

cdouble SourceSpectrum::alpha(ModeIndex m) const {
  const auto it = coeffs_.find(m);
  if (it == coeffs_.end()) return {};
  return kind_ == SourceKind::DeltaShell ? it->second : multipole_to_density(it->second, m.k, q_);
}

std::vector<int> SourceSpectrum::degrees() const {
  std::set<int> ks;
  for (const auto& [m, v] : coeffs_) ks.insert(m.k);
  return {ks.begin(), ks.end()};
}

std::vector<std::pair<int, cdouble>> SourceSpectrum::degree_coefficients(int k, SourceKind as) const {
  std::vector<std::pair<int, cdouble>> out;
  for (auto it = coeffs_.lower_bound({k, -k}); it != coeffs_.end() && it->first.k == k; ++it) {
    out.emplace_back(it->first.l, as == SourceKind::Multipole ? beta(it->first) : alpha(it->first));
  }
  return out;
}

double SourceSpectrum::beta_power(int k) const {
  double s = 0.0;
  for (const auto& [l, b] : degree_coefficients(k, SourceKind::Multipole)) s += std::norm(b);
  return s;
}

double SourceSpectrum::alpha_power(int k) const {
  double s = 0.0;
  for (const auto& [l, a] : degree_coefficients(k, SourceKind::DeltaShell)) s += std::norm(a);
  return s;
}

bool SourceSpectrum::is_real_valued(double tol) const {
  for (const auto& [m, v] : coeffs_) {
    const auto it = coeffs_.find({m.k, -m.l});
    const cdouble partner = it == coeffs_.end() ? cdouble{} : it->second;
    const cdouble expected = (m.l % 2 == 0 ? 1.0 : -1.0) * std::conj(v);
    if (std::abs(partner - expected) > tol * std::abs(v)) return false;
  }
  return true;
}

SourceSpectrum SourceSpectrum::scaled(double s) const {
  SourceSpectrum out(kind_, q_, k_max_);
  for (const auto& [m, v] : coeffs_) out.set(m, s * v);
  return out;
}

SourceSpectrum SourceSpectrum::truncated(int k_max) const {
  SourceSpectrum out(kind_, q_, k_max);
  for (const auto& [m, v] : coeffs_) {
    if (m.k <= k_max) out.set(m, v);
  }
  return out;
}

}  // namespace calr
