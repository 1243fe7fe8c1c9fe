#include <doctest.h>

#include <cmath>

#include <calr/calr.hpp>

#include "oracles/quadrature.hpp"

using namespace calr;

namespace {

LayeredConfig whole_space(cdouble eps_c, cdouble eps_s, double eta) {
  LayeredConfig c;
  c.r_i = 1.0;
  c.r_e = 2.0;
  c.eps_c = eps_c;
  c.eps_s = eps_s;
  c.eta = eta;
  c.loss_region = LossRegion::WholeSpace;
  return c;
}

SweepTemplate plasmonic_whole_space() {
  SweepTemplate t;
  t.base = whole_space(1.0, 1.0, 0.0);
  t.materials = MaterialKind::PlasmonicShell;
  return t;
}

int k_of(double eta) { return select_k_of_eta(eta, whole_space(1.0, 1.0, eta), KRule::WholeSpaceRule).k; }

}  // namespace

TEST_SUITE("variational") {
  TEST_CASE("psi-hat energy: closed form, profile and quadrature agree") {
    CHECK(psi_hat_energy(1, 2.0) == doctest::Approx(24.0));
    CHECK(psi_hat_energy(1, 1.0) == doctest::Approx(3.0));
    for (int k = 1; k <= 20; ++k) {
      const RadialProfile p = psi_hat_profile(k, 2.0);
      CHECK(p.flux_residual(2.0) < 1e-10);
      CHECK(p.continuity_residual(2.0) < 1e-14);
      CHECK(std::abs(psi_hat_jump_pairing(k, 2.0) / psi_hat_energy(k, 2.0) - 1.0) < 1e-10);
      CHECK(relative_difference(p.dirichlet_energy(), psi_hat_energy(k, 2.0)) < 1e-12);
    }
    // independent radial quadrature for k = 1, r_e = 2
    auto R = [](double r) { return r < 2.0 ? cdouble(r) : cdouble(8.0 / (r * r)); };
    auto dR = [](double r) { return r < 2.0 ? cdouble(1.0) : cdouble(-16.0 / (r * r * r)); };
    const double e = oracle::radial_energy(1, R, dR, 0.0, 2.0) +
                     oracle::radial_energy(1, R, dR, 2.0, std::numeric_limits<double>::infinity());
    CHECK(e == doctest::Approx(24.0).epsilon(1e-10));
  }

  TEST_CASE("nr1 family: flux jump at the source sphere") {
    const double re = 2.0;
    const double q = 3.0;
    for (int k = 1; k <= 40; ++k) {
      const RadialProfile p = nr1_profile(k, re, q);
      const double ren = std::pow(re, 2 * k + 1);
      const double expected = -((4.0 * k * (k + 1) + ren) * std::pow(q, k - 1)) / (ren * (2.0 * k + 1));
      CHECK(std::abs(p.flux_jump(q).real() / expected - 1.0) < 1e-10);
      for (double a : {1.0, re}) {
        CHECK(p.continuity_residual(a) < 1e-12);
        CHECK(p.flux_residual(a) < 1e-10);
      }
      const cdouble lam = nr1_lambda(1.0, k, re, q);
      CHECK(primal_constraint_residual(p, lam, 1.0, q) < 1e-10);
    }
  }

  TEST_CASE("nr1 bound is linear in eta") {
    const LayeredConfig c = whole_space(1.0, -1.0, 0.0);
    const auto src = SourceSpectrum::single(SourceKind::DeltaShell, 3.0, {3, 0}, 1.0, 8);
    const BoundReport a = primal_bound_nr1(c, src, 1e-3);
    const BoundReport b = primal_bound_nr1(c, src, 1e-6);
    CHECK(a.value / b.value == doctest::Approx(1e3).epsilon(0.01));
    CHECK(a.value == doctest::Approx(a.parts.at("v-energy") + a.parts.at("w-energy")));
    const SourceSpectrum zero(SourceKind::DeltaShell, 3.0, 8);
    CHECK(primal_bound_nr1(c, zero, 1e-3).value == 0.0);
  }

  TEST_CASE("nr1 bound preconditions") {
    const auto src = SourceSpectrum::single(SourceKind::DeltaShell, 3.0, {3, 0}, 1.0, 8);
    CHECK_THROWS_AS(primal_bound_nr1(whole_space(1.0, -1.5, 0.0), src, 1e-3), PreconditionError);
    LayeredConfig shell = whole_space(1.0, -1.0, 0.0);
    shell.loss_region = LossRegion::Shell;
    CHECK_THROWS_AS(primal_bound_nr1(shell, src, 1e-3), PreconditionError);
    const auto complex_src = SourceSpectrum::single(SourceKind::DeltaShell, 3.0, {3, 1}, {1.0, 1.0}, 8);
    CHECK_THROWS_AS(primal_bound_nr1(whole_space(1.0, -1.0, 0.0), complex_src, 1e-3), PreconditionError);
  }

  TEST_CASE("dual r1: optimum scales as 1/eta") {
    const int k0 = 3;
    const double e = -1.0 - 1.0 / k0;
    const auto src = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 2.5, 1.0, 16);
    CHECK(dual_bound_r1(whole_space(e, e, 1e-3), src, k0, 0.0).value == 0.0);
    const BoundReport a = dual_bound_r1(whole_space(e, e, 1e-3), src, k0, 1.0);
    const BoundReport b = dual_bound_r1(whole_space(e, e, 5e-4), src, k0, 1.0);
    const BoundReport at_a = dual_bound_r1(whole_space(e, e, 1e-3), src, k0, a.diagnostics.at("lambda-star"));
    const BoundReport at_b = dual_bound_r1(whole_space(e, e, 5e-4), src, k0, b.diagnostics.at("lambda-star"));
    CHECK(std::abs(at_b.value / at_a.value - 2.0) < 1e-10);
    CHECK(std::abs(at_a.value / a.diagnostics.at("optimum") - 1.0) < 1e-12);
    CHECK(at_a.diagnostics.at("constraint-residual") < 1e-10);
  }

  TEST_CASE("dual r1: lambda = eta^{-1/2} diverges while eta lambda^2 stays fixed") {
    const int k0 = 3;
    const double e = -1.0 - 1.0 / k0;
    const auto src = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 2.5, 1.0, 16);
    double last = -1e300;
    for (int j = 2; j <= 8; ++j) {
      const double eta = std::pow(10.0, -j);
      const double lam = 1.0 / std::sqrt(eta);
      const BoundReport r = dual_bound_r1(whole_space(e, e, eta), src, k0, lam);
      CHECK(eta * lam * lam == doctest::Approx(1.0));
      CHECK(r.value > last);
      last = r.value;
    }
    CHECK(last > 1e3);
  }

  TEST_CASE("dual r1: vanishing coefficient is a precondition error") {
    const double e = -1.0 - 1.0 / 3;
    const auto src = SourceSpectrum::single(SourceKind::DeltaShell, 2.5, {2, 0}, 1.0, 16);
    CHECK_THROWS_AS(dual_bound_r1(whole_space(e, e, 1e-3), src, 3, 1.0), PreconditionError);
    const auto re_only = SourceSpectrum::single(SourceKind::DeltaShell, 2.5, {3, 0}, 1.0, 16);
    CHECK_THROWS_AS(dual_bound_r1(whole_space(e, e, 1e-3), re_only, 3, 1.0, FamilyPart::Im), PreconditionError);
  }

  TEST_CASE("dual r2 with a trivial core is dual r1 minus the core correction") {
    const auto src = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 2.5, 1.0, 32);
    for (int j : {6, 9, 12}) {
      const double eta = std::pow(0.5, j - 0.5);
      const int K = k_of(eta);
      const double e = -1.0 - 1.0 / K;
      const BoundReport r2 = dual_bound_r2(whole_space(1.0, e, eta), src, eta);
      const double lam = r2.family.lambda.real();
      const BoundReport r1 = dual_bound_r1(whole_space(e, e, eta), src, K, lam);
      CHECK(std::abs(r2.value - (r1.value - r2.parts.at("v-energy"))) <= 1e-9 * std::abs(r1.value));
      CHECK(dual_bound_r2(whole_space(1.0, e, eta), src, eta, 0.0).value == 0.0);
    }
  }

  TEST_CASE("dual r2 diverges with an envelope growing like (r_e^3/q^2)^k / k") {
    const auto src = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 2.5, 1.0, 64);
    std::vector<double> ks;
    std::vector<double> env;
    std::vector<double> model;
    double last = 0.0;
    for (int j = 12; j <= 30; ++j) {
      const double eta = std::pow(0.5, j - 0.5);
      const int K = k_of(eta);
      const BoundReport r = dual_bound_r2(whole_space(1.0, -1.0 - 1.0 / K, eta), src, eta);
      CHECK(r.value > last);
      last = r.value;
      ks.push_back(K);
      env.push_back(std::log(r.diagnostics.at("envelope")));
      model.push_back(K * std::log(8.0 / 6.25) - std::log(K));
    }
    const double rate = (env.back() - env.front()) / (ks.back() - ks.front());
    const double expected = (model.back() - model.front()) / (ks.back() - ks.front());
    CHECK(std::abs(rate / expected - 1.0) < 0.2);
  }

  TEST_CASE("dual r2 preconditions") {
    const auto far = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 3.0, 1.0, 16);
    const double eta = std::pow(0.5, 5.5);
    CHECK_THROWS_AS(dual_bound_r2(whole_space(1.0, -1.0 - 1.0 / k_of(eta), eta), far, eta), PreconditionError);
    const auto near = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 2.5, 1.0, 16);
    CHECK_THROWS_AS(dual_bound_r2(whole_space(1.0, -1.25, eta), near, eta), PreconditionError);
  }

  TEST_CASE("crc family: lambda spot value and transmission") {
    CHECK(vtilde_lambda(1.0, 2, 3.0).real() == doctest::Approx(-1.0 / 15.0));
    for (int K : {2, 5}) {
      for (int k = 1; k <= 12; ++k) {
        const RadialProfile p = crc_profile(k, K, 2.0, 3.2);
        CHECK(p.flux_residual(1.0) < 1e-10);
        CHECK(p.flux_residual(2.0) < 1e-10);
        if (k == K) continue;
        CHECK(primal_constraint_residual(p, crc_lambda(1.0, k, K, 2.0, 3.2), 1.0, 3.2) < 1e-10);
      }
    }
  }

  TEST_CASE("crc family: |lambda_k| <= C |alpha_k| k(eta)^6 / (q^k k) on the sweep range") {
    // k(eta) = 1 lies outside the vanishing-loss range, see the README
    const double q = 3.2;
    double worst = 0.0;
    for (int K = 2; K <= 12; ++K) {
      for (int k = 1; k <= 40; ++k) {
        if (k == K) continue;
        const double c = std::abs(crc_lambda(1.0, k, K, 2.0, q)) * std::pow(q, k) * k / std::pow(K, 6);
        worst = std::max(worst, c);
      }
    }
    CHECK(worst <= 10.0);
  }

  TEST_CASE("crc bounds stay bounded and above the dissipated energy") {
    const auto src = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 3.2, 1.0, 64);
    const SweepTemplate t = plasmonic_whole_space();
    double w_c_max = 0.0;
    for (int j = 3; j <= 20; ++j) {
      const double eta = std::pow(0.5, j - 0.5);
      const int K = k_of(eta);
      const LayeredConfig c = materials_at(t, K, eta);
      const BoundReport r = primal_bound_crc(c, src, eta, CrcMode::AdaptiveK);
      CHECK(r.diagnostics.at("constraint-residual") < 1e-10);
      CHECK(r.value >= dissipated_energy(c, src).total.real());
      CHECK(r.value == doctest::Approx(r.parts.at("v-energy") + r.parts.at("w-energy")));
      w_c_max = std::max(w_c_max, r.diagnostics.at("w-envelope-C"));
    }
    CHECK(w_c_max < 10.0);
    const auto inside = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 2.5, 1.0, 64);
    const double eta = std::pow(0.5, 5.5);
    CHECK_THROWS_AS(primal_bound_crc(materials_at(t, k_of(eta), eta), inside, eta, CrcMode::AdaptiveK),
                    PreconditionError);
  }

  TEST_CASE("fixed-k0 crc bound is linear in eta and above the energy") {
    const auto src = SourceSpectrum::zonal_constant(SourceKind::DeltaShell, 2.5, 1.0, 64);
    const LayeredConfig c = whole_space(1.0, -1.2, 0.0);
    for (int j = 1; j <= 8; ++j) {
      const double eta = std::pow(10.0, -j);
      LayeredConfig ce = c;
      ce.eta = eta;
      const BoundReport r = primal_bound_crc(ce, src, eta, CrcMode::FixedK0);
      CHECK(r.parts.at("w-energy") == 0.0);
      CHECK(r.value >= dissipated_energy(ce, src).total.real());
    }
  }

  TEST_CASE("unit-core normalization: bounds scale with r_i like the energy") {
    // the same structure in units twice as large
    const auto src1 = SourceSpectrum::single(SourceKind::DeltaShell, 3.0, {2, 0}, 1.0, 8);
    const auto src2 = SourceSpectrum::single(SourceKind::DeltaShell, 6.0, {2, 0}, 0.5, 8);
    LayeredConfig c1 = whole_space(1.0, -1.0, 1e-3);
    LayeredConfig c2 = c1;
    c2.r_i = 2.0;
    c2.r_e = 4.0;
    const double e1 = dissipated_energy(c1, src1).total.real();
    const double e2 = dissipated_energy(c2, src2).total.real();
    const double i1 = primal_bound_nr1(c1, src1, 1e-3).value;
    const double i2 = primal_bound_nr1(c2, src2, 1e-3).value;
    CHECK(e2 / e1 == doctest::Approx(i2 / i1).epsilon(1e-10));
  }
}
