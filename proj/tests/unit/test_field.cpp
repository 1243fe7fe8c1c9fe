#include <doctest.h>

#include <cmath>
#include <numbers>

#include <calr/calr.hpp>

using namespace calr;

namespace {

LayeredConfig plasmonic(int k0, double eta) {
  SweepTemplate t;
  t.base.r_i = 1.0;
  t.base.r_e = 2.0;
  t.base.loss_region = LossRegion::Shell;
  t.materials = MaterialKind::PlasmonicShell;
  return materials_at(t, k0, eta);
}

SweepTemplate shell_template() {
  SweepTemplate t;
  t.base.r_i = 1.0;
  t.base.r_e = 2.0;
  t.base.loss_region = LossRegion::Shell;
  t.materials = MaterialKind::PlasmonicShell;
  return t;
}

std::vector<double> band_grid(int j0, int j1) {
  std::vector<double> etas;
  for (int j = j0; j <= j1; ++j) etas.push_back(std::pow(0.5, j - 0.5));
  return etas;
}

}  // namespace

TEST_SUITE("field") {
  TEST_CASE("homogeneous medium has no anomaly") {
    LayeredConfig c;
    const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 16);
    const FieldEvaluator f(c, src);
    for (double r : {0.3, 1.0, 1.7, 2.0, 2.2, 3.0, 10.0}) {
      const FieldSample s = f.sample({r, 0.7, 0.3});
      CHECK(std::abs(s.anomaly) < 1e-12);
      CHECK(std::abs(s.value - s.newtonian) < 1e-12 * std::max(1.0, std::abs(s.value)));
    }
  }

  TEST_CASE("field is continuous across the interfaces") {
    auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 12);
    src.set({3, 2}, {0.3, -0.1});
    src.set({3, -2}, {0.3, 0.1});
    const FieldEvaluator f(plasmonic(3, 1e-2), src);
    for (double r : {1.0, 2.0}) {
      for (double t : {0.2, 1.1, 2.5}) {
        const cdouble in = f.sample({r, t, 0.4}, Side::Inner).value;
        const cdouble out = f.sample({r, t, 0.4}, Side::Outer).value;
        CHECK(std::abs(in - out) <= 1e-8 * std::max(1.0, std::abs(in)));
      }
    }
  }

  TEST_CASE("domain errors") {
    const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 8);
    const FieldEvaluator f(plasmonic(3, 1e-2), src);
    CHECK_THROWS_AS(static_cast<void>(f.sample({2.5, 1.0, 0.0})), DomainError);
    CHECK_THROWS_AS(static_cast<void>(f.sample({0.0, 1.0, 0.0})), DomainError);
    const auto inside = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 1.5, 2.5, 8);
    CHECK_THROWS_AS(FieldEvaluator(plasmonic(3, 1e-2), inside), DomainError);
  }

  TEST_CASE("exterior anomaly decays") {
    const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 12);
    const FieldEvaluator f(plasmonic(2, 1e-3), src);
    double last = std::abs(f.sample({10.0, 0.5, 0.0}).anomaly);
    for (double r = 20.0; r <= 160.0; r *= 2.0) {
      const double now = std::abs(f.sample({r, 0.5, 0.0}).anomaly);
      CHECK(now <= 0.75 * last);
      last = now;
    }
  }

  TEST_CASE("exterior coefficients recovered from two radii") {
    const LayeredConfig c = plasmonic(4, 1e-2);
    for (int k = 1; k <= 8; ++k) {
      const auto src = SourceSpectrum::single(SourceKind::Multipole, 3.0, {k, 0}, 1.0, 8);
      const FieldEvaluator f(c, src);
      const double y = eval_harmonic({k, 0}, 0.9, 0.0).real();
      // outside the device the anomaly is d r^{-k-1} Y
      const double r1 = 2.2;
      const double r2 = 2.7;
      const cdouble d1 = f.sample({r1, 0.9, 0.0}).anomaly / y * std::pow(r1, k + 1);
      const cdouble d2 = f.sample({r2, 0.9, 0.0}).anomaly / y * std::pow(r2, k + 1);
      const cdouble d = solve_mode_closed_form(c, k).d.to_complex();
      CHECK(std::abs(d1 - d) <= 1e-8 * std::abs(d));
      CHECK(std::abs(d2 - d) <= 1e-8 * std::abs(d));
    }
  }

  TEST_CASE("degree-1 field rotates with its source") {
    // alpha (Y_1^{-1} - Y_1^1) / sqrt2 is the x dipole; the zonal one is the z dipole
    const double s = 1.0 / std::numbers::sqrt2;
    auto x_src = SourceSpectrum(SourceKind::Multipole, 3.0, 1);
    x_src.set({1, -1}, s);
    x_src.set({1, 1}, -s);
    const auto z_src = SourceSpectrum::single(SourceKind::Multipole, 3.0, {1, 0}, 1.0, 1);
    const LayeredConfig c = plasmonic(1, 0.2);
    const FieldEvaluator fx(c, x_src);
    const FieldEvaluator fz(c, z_src);
    for (double r : {0.5, 1.5, 2.4, 5.0}) {
      // the point (sin t, 0, cos t) maps to (cos t, 0, sin t) under z <-> x
      for (double t : {0.3, 0.9, 1.4}) {
        const cdouble uz = fz.sample({r, t, 0.0}).value;
        const cdouble ux = fx.sample({r, std::numbers::pi / 2 - t, 0.0}).value;
        CHECK(std::abs(uz - ux) <= 1e-9 * std::max(1.0, std::abs(uz)));
      }
    }
  }

  TEST_CASE("probe ring and default probe radius") {
    const auto ring = probe_ring(3.0);
    REQUIRE(ring.size() == 33);
    for (const auto& p : ring) {
      CHECK(p.r == 3.0);
      CHECK(p.theta >= 0.0);
      CHECK(p.theta <= std::numbers::pi);
    }
    LayeredConfig c;
    c.r_e = 2.0;
    CHECK(default_probe_radius(c, 2.5) == doctest::Approx(1.05 * std::sqrt(8.0)));
    CHECK(default_probe_radius(c, 3.5) == doctest::Approx(1.05 * 3.5));
  }

  TEST_CASE("normalized field vanishes for a source inside the critical radius") {
    const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 64);
    const CalrDiagnostic d =
        calr_diagnostic(shell_template(), src, band_grid(5, 20), Coupling::adaptive(KRule::ShellRule), 3.0);
    CHECK(d.trend == DiagnosticTrend::Vanishing);
    CHECK(d.energy_verdict == Verdict::Blowup);
    CHECK(d.points.size() == 16);
  }

  TEST_CASE("normalized field does not vanish outside the critical radius") {
    const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 3.5, 3.5, 64);
    const CalrDiagnostic d =
        calr_diagnostic(shell_template(), src, band_grid(5, 20), Coupling::adaptive(KRule::ShellRule));
    CHECK(d.probe_radius == doctest::Approx(1.05 * 3.5));
    CHECK(d.trend == DiagnosticTrend::NotVanishing);
    CHECK(d.energy_verdict == Verdict::Bounded);
  }

  TEST_CASE("zero energy leaves the diagnostic undefined") {
    SweepTemplate t;
    t.base.loss_region = LossRegion::Shell;
    const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 16);
    const CalrDiagnostic d = calr_diagnostic(t, src, {0.0}, Coupling::fixed(1));
    CHECK(d.trend == DiagnosticTrend::Undefined);
    REQUIRE(d.points.size() == 1);
    for (const auto& p : d.points) {
      CHECK(std::isnan(p.ratio));
      CHECK_FALSE(p.status.empty());
    }
    CHECK_THROWS_AS(calr_diagnostic(t, src, {1e-1}, Coupling::fixed(1), 1.5), DomainError);
  }

  TEST_CASE("anomaly beyond the critical radius stays bounded along the sweep") {
    const auto src = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 3.5, 3.5, 64);
    const double r = 1.5 * std::sqrt(8.0);
    double lo = INFINITY;
    double hi = 0.0;
    for (int j = 5; j <= 20; ++j) {
      const double eta = std::pow(0.5, j - 0.5);
      const int k = select_k_of_eta(eta, shell_template().base, KRule::ShellRule).k;
      const FieldEvaluator f(materials_at(shell_template(), k, eta), src);
      for (const auto& p : probe_ring(r)) {
        const double a = std::abs(f.sample(p).anomaly);
        hi = std::max(hi, a);
      }
      lo = std::min(lo, std::abs(f.sample({r, 0.0, 0.0}).anomaly));
    }
    CHECK(std::isfinite(hi));
    CHECK(hi < 10.0);
    CHECK(lo > 0.0);
  }
}
