#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <calr/calr.hpp>

#include "oracles/quadrature.hpp"

using namespace calr;

TEST_SUITE("core-model") {
  TEST_CASE("ScaledComplex keeps the mantissa in [1, 2)") {
    for (double x : {1.0, 3.0, 0.7, 1e-300, 7e300, -5.5}) {
      const ScaledComplex z(cdouble{x, 0.25 * x});
      const double m = std::abs(z.mantissa());
      CHECK(m >= 1.0);
      CHECK(m < 2.0);
      CHECK(std::abs(z.to_complex() - cdouble{x, 0.25 * x}) <= 1e-15 * std::abs(cdouble{x, 0.25 * x}));
    }
    const ScaledComplex zero;
    CHECK(zero.is_zero());
    CHECK(zero.exponent() == 0);
    CHECK((ScaledComplex(2.0) - ScaledComplex(2.0)).exponent() == 0);
  }

  TEST_CASE("ScaledComplex round trip (x * y) / y across huge exponents") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<std::int64_t> e(-10000, 10000);
    for (int i = 0; i < 500; ++i) {
      const ScaledComplex x({u(rng), u(rng)}, e(rng));
      const ScaledComplex y({u(rng) + 2.0, u(rng)}, e(rng));
      CHECK(relative_difference((x * y) / y, x) < 1e-14);
      // addition only round-trips when neither term swamps the other
      const ScaledComplex z({u(rng) + 2.0, u(rng)}, x.exponent() + i % 7 - 3);
      CHECK(relative_difference((x + z) - z, x) < 1e-12);
    }
  }

  TEST_CASE("ScaledComplex powers beyond double range") {
    const ScaledComplex big = ScaledComplex::power(2.0, 5000);
    CHECK(big.exponent() == 5000);
    const ScaledComplex p = ScaledComplex::power(1.5, 3000) * ScaledComplex::power(1.5, -2990);
    CHECK(p.real() == doctest::Approx(std::pow(1.5, 10)).epsilon(1e-12));
    CHECK(ScaledComplex(4.0).sqrt().real() == doctest::Approx(2.0));
    CHECK(ScaledComplex(1e-200).log_abs() == doctest::Approx(std::log(1e-200)));
    CHECK(real_less(ScaledComplex::power(3.0, -900), ScaledComplex::power(3.0, -899)));
    CHECK_THROWS(ScaledComplex(1.0) / ScaledComplex());
  }

  TEST_CASE("LayeredConfig validation and effective permittivities") {
    LayeredConfig c;
    c.eps_s = {-1.0, 0.0};
    c.eta = 0.25;
    CHECK(c.rho() == doctest::Approx(0.5));
    CHECK(c.shell_eff() == cdouble{-1.0, 0.25});
    CHECK(c.core_eff() == cdouble{1.0, 0.0});
    c.loss_region = LossRegion::WholeSpace;
    CHECK(c.core_eff() == cdouble{1.0, 0.25});
    CHECK(c.matrix_eff() == cdouble{1.0, 0.25});
    CHECK(c.eps_at(1.5) == c.shell_eff());
    CHECK(c.eps_at(0.5) == c.core_eff());
    CHECK(c.eps_at(3.0) == c.matrix_eff());

    LayeredConfig bad;
    bad.r_i = 2.0;
    bad.r_e = 2.0;
    CHECK_FALSE(bad.is_valid());
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = LayeredConfig{};
    bad.eta = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }

  TEST_CASE("SourceSpectrum enforces zero mean and the degree range") {
    SourceSpectrum s(SourceKind::Multipole, 3.0, 8);
    CHECK_THROWS_AS(s.set({0, 0}, 1.0), DomainError);
    CHECK_THROWS_AS(s.set({9, 0}, 1.0), DomainError);
    CHECK_THROWS_AS(s.set({2, 3}, 1.0), DomainError);
    s.set({2, 1}, {1.0, 2.0});
    CHECK(s.degrees() == std::vector<int>{2});
    CHECK(s.beta_power(2) == doctest::Approx(5.0));

    const auto g = SourceSpectrum::zonal_geometric(SourceKind::Multipole, 2.5, 2.5, 10);
    CHECK(g.beta({3, 0}).real() == doctest::Approx(std::pow(2.5, -3)));
    CHECK(g.scaled(3.0).beta_power(4) == doctest::Approx(9.0 * g.beta_power(4)));
    CHECK(g.truncated(4).degrees().size() == 4);
  }

  TEST_CASE("density and multipole coefficients convert both ways") {
    const double q = 2.5;
    for (int k : {1, 3, 9}) {
      const cdouble alpha{0.3, -1.1};
      const cdouble beta = density_to_multipole(alpha, k, q);
      CHECK(std::abs(beta - (-alpha * std::pow(q, 1 - k) / (2.0 * k + 1))) < 1e-15);
      CHECK(std::abs(multipole_to_density(beta, k, q) - alpha) < 1e-14);
    }
  }

  TEST_CASE("spherical harmonics: reference values and symmetry") {
    CHECK(eval_harmonic({0, 0}, 0.7, 2.0).real() == doctest::Approx(0.5 / std::sqrt(std::numbers::pi)));
    CHECK(eval_harmonic({1, 0}, 0.0, 0.0).real() == doctest::Approx(std::sqrt(3.0 / (4.0 * std::numbers::pi))));
    CHECK_THROWS_AS(eval_harmonic({2, 3}, 0.1, 0.0), DomainError);
    CHECK_THROWS_AS(eval_harmonic({2, 1}, -0.1, 0.0), DomainError);
    for (int k = 1; k <= 6; ++k) {
      for (int l = 1; l <= k; ++l) {
        const cdouble y = eval_harmonic({k, l}, 0.9, 0.4);
        const cdouble ym = eval_harmonic({k, -l}, 0.9, 0.4);
        CHECK(std::abs(ym - (l % 2 ? -1.0 : 1.0) * std::conj(y)) < 1e-14);
      }
    }
  }

  TEST_CASE("spherical harmonics: orthonormality by quadrature") {
    const double n = oracle::sphere_integral(
        [](double t, double p) { return std::norm(eval_harmonic({5, 3}, t, p)); });
    CHECK(std::abs(n - 1.0) < 1e-10);
    const double cross = oracle::sphere_integral([](double t, double p) {
      return (eval_harmonic({5, 3}, t, p) * std::conj(eval_harmonic({4, 3}, t, p))).real();
    });
    CHECK(std::abs(cross) < 1e-12);
  }

  TEST_CASE("spherical harmonics: addition theorem") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const double theta = std::acos(2.0 * u(rng) - 1.0);
      const double phi = 2.0 * std::numbers::pi * u(rng);
      for (int k = 0; k <= 10; ++k) {
        double sum = 0.0;
        for (int l = -k; l <= k; ++l) sum += std::norm(eval_harmonic({k, l}, theta, phi));
        CHECK(std::abs(sum - (2.0 * k + 1.0) / (4.0 * std::numbers::pi)) < 1e-10);
      }
    }
  }

  TEST_CASE("theta derivative of the harmonics matches differences") {
    const double h = 1e-5;
    for (ModeIndex m : {ModeIndex{3, 1}, ModeIndex{6, -2}, ModeIndex{2, 0}}) {
      const double t = 1.1;
      const cdouble fd = (eval_harmonic(m, t + h, 0.3) - eval_harmonic(m, t - h, 0.3)) / (2.0 * h);
      CHECK(std::abs(eval_harmonic_dtheta(m, t, 0.3) - fd) < 1e-8);
    }
  }

  TEST_CASE("mode_shell_energy reference values") {
    CHECK(mode_shell_energy(1, 1.0, 0.0, 0.0, 1.0).real() == doctest::Approx(1.0));
    CHECK(mode_shell_energy(4, 0.0, 0.0, 0.5, 3.0).is_zero());
    CHECK(mode_shell_energy(1, 0.0, 8.0, 2.0, std::numeric_limits<double>::infinity()).real() ==
          doctest::Approx(16.0));
    CHECK_THROWS_AS(mode_shell_energy(2, 0.0, 1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(mode_shell_energy(2, 1.0, 0.0, 1.0, std::numeric_limits<double>::infinity()), DomainError);
  }

  TEST_CASE("mode_shell_energy (k=1, b=1) matches a 3D quadrature of the mode") {
    // u = r Y_1^0 on the unit ball, integrated over radius and sphere
    const double e = oracle::line_integral(
        [](double r) {
          return r * r * oracle::sphere_integral([&](double t, double p) {
            const cdouble y = eval_harmonic({1, 0}, t, p);
            const cdouble yt = eval_harmonic_dtheta({1, 0}, t, p);
            return std::norm(y) + std::norm(yt);
          }, 4);
        },
        0.0, 1.0);
    CHECK(std::abs(e - 1.0) < 1e-10);
  }

  TEST_CASE("mode_shell_energy matches radial quadrature for random data") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> rad(0.5, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = 1 + trial % 20;
      double r0 = rad(rng);
      double r1 = rad(rng);
      if (r0 > r1) std::swap(r0, r1);
      if (r1 - r0 < 0.05) r1 = r0 + 0.05;
      const cdouble b{u(rng), u(rng)};
      const cdouble c{u(rng), u(rng)};
      auto R = [&](double r) { return b * std::pow(r, k) + c * std::pow(r, -k - 1); };
      auto dR = [&](double r) { return b * double(k) * std::pow(r, k - 1) - c * double(k + 1) * std::pow(r, -k - 2); };
      const double ref = oracle::radial_energy(k, R, dR, r0, r1);
      const double got = mode_shell_energy(k, b, c, r0, r1).real();
      CHECK(std::abs(got - ref) <= 1e-8 * ref);
    }
  }

  TEST_CASE("RadialProfile evaluates pieces and jumps") {
    // r on (0, 1) glued to r^{-2} outside, with eps 1 and 2
    const RadialProfile p(1, {{0.0, 1.0, 1.0, 1.0, {}}, {1.0, std::numeric_limits<double>::infinity(), 2.0, {}, 1.0}});
    CHECK(p.continuity_residual(1.0) < 1e-15);
    CHECK(p.flux(1.0, Side::Inner).real() == doctest::Approx(1.0));
    CHECK(p.flux(1.0, Side::Outer).real() == doctest::Approx(-4.0));
    CHECK(p.flux_jump(1.0).real() == doctest::Approx(-5.0));
    CHECK(p.dirichlet_energy().real() == doctest::Approx(1.0 + 2.0));
    CHECK_THROWS_AS(RadialProfile(1, {{0.5, 1.0, 1.0, 1.0, {}}}), DomainError);
  }
}
