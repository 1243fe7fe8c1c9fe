#include "calr/radial_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "calr/errors.hpp"

namespace calr {

namespace {

constexpr int kMaxOracleDegree = 20;
constexpr int kMinCellsPerSegment = 16;
// Inner and outer truncation radii relative to r_i and q.
constexpr double kInnerFactor = 0.25;
constexpr double kOuterFactor = 20.0;
// Refinement differences below this are rounding noise, not discretization error.
constexpr double kRoundingLevel = 1e-11;
// Components smaller than this fraction of the largest one are compared in
// absolute terms during the refinement check.
constexpr double kRefinementFloor = 1e-3;

struct Grid {
  std::vector<double> r;
  // index of the node sitting on r_i, r_e and q
  int at_ri = 0;
  int at_re = 0;
  int at_q = 0;
};

Grid build_grid(const LayeredConfig& cfg, double q, const RadialGridSpec& spec) {
  const std::array<double, 5> breaks{kInnerFactor * cfg.r_i, cfg.r_i, cfg.r_e, q, kOuterFactor * q};
  std::array<double, 4> len{};
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    len[i] = std::log(breaks[i + 1] / breaks[i]);
    total += len[i];
  }
  Grid g;
  g.r.push_back(breaks[0]);
  for (int i = 0; i < 4; ++i) {
    const int base = std::max(kMinCellsPerSegment, static_cast<int>(std::lround(spec.nodes * len[i] / total)));
    const int cells = base << spec.refine_level;
    const double s0 = std::log(breaks[i]);
    for (int j = 1; j < cells; ++j) g.r.push_back(std::exp(s0 + len[i] * j / cells));
    // breakpoints are stored exactly so that interface nodes coincide with r_i, r_e, q
    g.r.push_back(breaks[i + 1]);
    const int idx = static_cast<int>(g.r.size()) - 1;
    if (i == 0) g.at_ri = idx;
    if (i == 1) g.at_re = idx;
    if (i == 2) g.at_q = idx;
  }
  return g;
}

// Gaussian elimination with partial pivoting for a tridiagonal system
// (lower l, diagonal d, upper u); one extra super-diagonal absorbs row swaps.
std::vector<cdouble> solve_tridiagonal(std::vector<cdouble> l, std::vector<cdouble> d, std::vector<cdouble> u,
                                       std::vector<cdouble> b) {
  const std::size_t n = d.size();
  std::vector<cdouble> u2(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(l[i + 1]) > std::abs(d[i])) {
      // swap rows i and i+1
      std::swap(d[i], l[i + 1]);
      std::swap(u[i], d[i + 1]);
      if (i + 2 < n) std::swap(u2[i], u[i + 1]);
      std::swap(b[i], b[i + 1]);
    }
    if (d[i] == cdouble{}) throw OracleFailure("radial oracle: singular finite-difference system");
    const cdouble f = l[i + 1] / d[i];
    d[i + 1] -= f * u[i];
    if (i + 2 < n) u[i + 1] -= f * u2[i];
    b[i + 1] -= f * b[i];
    l[i + 1] = 0.0;
  }
  if (d[n - 1] == cdouble{}) throw OracleFailure("radial oracle: singular finite-difference system");
  std::vector<cdouble> x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    cdouble s = b[ii];
    if (ii + 1 < n) s -= u[ii] * x[ii + 1];
    if (ii + 2 < n) s -= u2[ii] * x[ii + 2];
    x[ii] = s / d[ii];
  }
  return x;
}

// Vertex-centred finite volumes in s = ln r for
//   d/ds(eps e^s R_s) - eps k(k+1) e^s R = -(2k+1) eps_m q^{k+1} delta(s - ln q),
// whose exact solution has unit incoming coefficient.
std::vector<cdouble> solve_radial(const LayeredConfig& cfg, int k, double q, const Grid& g) {
  const std::size_t n = g.r.size();
  const double kk = static_cast<double>(k) * (k + 1);
  std::vector<cdouble> lo(n, 0.0), di(n, 0.0), up(n, 0.0), rhs(n, 0.0);

  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double r0 = g.r[j];
    const double r1 = g.r[j + 1];
    const cdouble eps = cfg.eps_at(0.5 * (r0 + r1));
    // flux eps r^2 R' is constant across the cell for the pure-flux part:
    // G = eps (R1 - R0) / (1/r0 - 1/r1)
    const cdouble w = eps / (1.0 / r0 - 1.0 / r1);
    di[j] -= w;
    up[j] += w;
    lo[j + 1] += w;
    di[j + 1] -= w;
    // reaction term, lumped on each half cell: int e^s ds = r_mid - r_end
    const double r_half = std::sqrt(r0 * r1);
    di[j] -= eps * kk * (r_half - r0);
    di[j + 1] -= eps * kk * (r1 - r_half);
  }
  // regular core solution: eps r^2 R' = eps k r R at the inner end
  di[0] -= cfg.eps_at(g.r[0]) * static_cast<double>(k) * g.r[0];
  // decaying exterior solution: eps r^2 R' = -eps (k+1) r R at the outer end
  di[n - 1] -= cfg.matrix_eff() * static_cast<double>(k + 1) * g.r[n - 1];

  rhs[g.at_q] = -(2.0 * k + 1.0) * cfg.matrix_eff() * std::pow(q, k + 1);
  return solve_tridiagonal(std::move(lo), std::move(di), std::move(up), std::move(rhs));
}

// Least-squares coefficients of R on [lo_idx, hi_idx] in the given basis.
template <int N>
Eigen::Matrix<cdouble, N, 1> fit_layer(const Grid& g, const std::vector<cdouble>& values, int lo_idx, int hi_idx,
                                       const std::array<double (*)(double, const double*), N>& basis,
                                       const double* params) {
  const int m = hi_idx - lo_idx + 1;
  Eigen::Matrix<cdouble, Eigen::Dynamic, N> a(m, N);
  Eigen::Matrix<cdouble, Eigen::Dynamic, 1> y(m);
  for (int i = 0; i < m; ++i) {
    const double r = g.r[lo_idx + i];
    for (int c = 0; c < N; ++c) a(i, c) = basis[c](r, params);
    y(i) = values[lo_idx + i];
  }
  return a.colPivHouseholderQr().solve(y);
}

// params: {k, scale radius}
double grow_basis(double r, const double* p) { return std::pow(r / p[1], p[0]); }
double decay_basis(double r, const double* p) { return std::pow(p[2] / r, p[0] + 1.0); }

}  // namespace

ModeCoefficients radial_fd_coefficients(const LayeredConfig& cfg, int k, double q, RadialGridSpec grid) {
  cfg.validate();
  if (k < 1 || k > kMaxOracleDegree) throw DomainError("radial oracle: degree must be in [1, 20]");
  if (!(q > cfg.r_e) || !std::isfinite(q)) throw DomainError("radial oracle: source radius must exceed r_e");
  if (grid.nodes < 4 * kMinCellsPerSegment || grid.refine_level < 0) {
    throw DomainError("radial oracle: grid too coarse");
  }

  const Grid g = build_grid(cfg, q, grid);
  const std::vector<cdouble> R = solve_radial(cfg, k, q, g);
  const double kd = k;

  // core: a r^k with basis (r/r_i)^k
  const double pc[3] = {kd, cfg.r_i, cfg.r_i};
  const auto core = fit_layer<1>(g, R, 0, g.at_ri, {grow_basis}, pc);
  // shell: (r/r_e)^k and (r_i/r)^{k+1}
  const double ps[3] = {kd, cfg.r_e, cfg.r_i};
  const auto shell = fit_layer<2>(g, R, g.at_ri, g.at_re, {grow_basis, decay_basis}, ps);
  // matrix below q: (r/q)^k and (r_e/r)^{k+1}
  const double pm[3] = {kd, q, cfg.r_e};
  const auto matrix = fit_layer<2>(g, R, g.at_re, g.at_q, {grow_basis, decay_basis}, pm);

  // undo the basis scalings and normalize by the fitted incoming coefficient e
  const ScaledComplex e = ScaledComplex(matrix(0)) / ScaledComplex::power(q, k);
  if (e.is_zero()) throw OracleFailure("radial oracle: vanishing incoming coefficient");
  ModeCoefficients out;
  out.k = k;
  out.a = ScaledComplex(core(0)) / ScaledComplex::power(cfg.r_i, k) / e;
  out.b = ScaledComplex(shell(0)) / ScaledComplex::power(cfg.r_e, k) / e;
  out.c = ScaledComplex(shell(1)) * ScaledComplex::power(cfg.r_i, k + 1) / e;
  out.d = ScaledComplex(matrix(1)) * ScaledComplex::power(cfg.r_e, k + 1) / e;
  return out;
}

RadialOracleResult radial_oracle_report(const LayeredConfig& cfg, int k, double q, int nodes) {
  std::array<ModeCoefficients, 3> level;
  for (int i = 0; i < 3; ++i) level[i] = radial_fd_coefficients(cfg, k, q, {nodes, i});

  const double d01 = coefficient_distance(cfg, level[0], level[1], kRefinementFloor);
  const double d12 = coefficient_distance(cfg, level[1], level[2], kRefinementFloor);

  RadialOracleResult out;
  out.refinement_change = d12;
  if (d12 < kRoundingLevel) {
    out.observed_order = std::numeric_limits<double>::quiet_NaN();
    out.coeffs = level[2];
    return out;
  }
  out.observed_order = std::log2(d01 / d12);
  if (!(out.observed_order > 1.5) || d12 > 1e-2) {
    std::ostringstream os;
    os << "radial oracle: no second-order convergence at degree " << k << " (observed order "
       << out.observed_order << ", change " << d12 << ")";
    throw OracleFailure(os.str());
  }
  // Richardson step for an h^2 leading error
  const ScaledComplex third(1.0 / 3.0);
  auto extrapolate = [&](const ScaledComplex& fine, const ScaledComplex& coarse) {
    return fine + (fine - coarse) * third;
  };
  out.coeffs.k = k;
  out.coeffs.a = extrapolate(level[2].a, level[1].a);
  out.coeffs.b = extrapolate(level[2].b, level[1].b);
  out.coeffs.c = extrapolate(level[2].c, level[1].c);
  out.coeffs.d = extrapolate(level[2].d, level[1].d);
  return out;
}

}  // namespace calr
