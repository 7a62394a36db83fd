#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/ellint_1.hpp>
#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>
#include <numbers>

#include "nsk/elliptic.hpp"
#include "nsk/errors.hpp"

using namespace nsk;

TEST_CASE("K matches the Legendre integral") {
  CHECK(std::abs(elliptic_K(0.0) - std::numbers::pi / 2) <= 1e-15);
  for (double k : {0.1, 0.5, 0.9, 0.999, 0.999999}) {
    CHECK(elliptic_K(k) == doctest::Approx(boost::math::ellint_1(k)).epsilon(1e-13));
  }
}

TEST_CASE("K from the complement keeps precision near k = 1") {
  const double kc = 1e-12;
  // K ~ ln(4 / k') + O(k'^2 ln k')
  CHECK(elliptic_K_from_complement(kc) == doctest::Approx(std::log(4.0 / kc)).epsilon(1e-14));
  CHECK(elliptic_K(0.5) == doctest::Approx(elliptic_K_from_complement(std::sqrt(0.75))).epsilon(1e-15));
}

TEST_CASE("sn inverts the incomplete integral") {
  for (double k : {0.0, 0.3, 0.8, 0.99}) {
    for (double phi : {0.1, 0.7, 1.3, 2.5}) {
      const double u = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); }, 0.0,
          phi, 15, 1e-13);
      CHECK(jacobi_sn(u, k) == doctest::Approx(std::sin(phi)).epsilon(1e-12));
    }
  }
}

TEST_CASE("sn, cn, dn agree with an independent implementation") {
  for (double k : {0.2, 0.9, 0.9999}) {
    const double kc = std::sqrt(1 - k * k);
    for (double u : {-3.0, 0.4, 2.2, 7.9}) {
      const JacobiTriple t = jacobi_sncndn(u, k, kc);
      double cn = 0, dn = 0;
      const double sn = boost::math::jacobi_elliptic(k, u, &cn, &dn);
      CHECK(t.sn == doctest::Approx(sn).epsilon(1e-12));
      CHECK(t.cn == doctest::Approx(cn).epsilon(1e-12));
      CHECK(t.dn == doctest::Approx(dn).epsilon(1e-12));
    }
  }
}

TEST_CASE("modulus 1 degenerates to tanh") {
  for (double u : {-2.0, 0.3, 1.5}) CHECK(jacobi_sn(u, 1.0) == doctest::Approx(std::tanh(u)).epsilon(1e-15));
}

TEST_CASE("k_from_eps satisfies the period relation") {
  for (double eps : {1e-3, 1e-4, 1e-5}) {
    const CnoidalParams p = k_from_eps(eps);
    CHECK(std::abs(cnoidal_relation_residual(p)) <= 1e-12);
    CHECK(p.period() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(k_from_eps(0.01), NoCnoidalWaveError);
  CHECK_THROWS_AS(k_from_eps(0.0), NoCnoidalWaveError);
  CHECK(cnoidal_eps_limit() == doctest::Approx(1.0 / (16 * std::numbers::pi * std::numbers::pi)));
}

TEST_CASE("cnoidal profile solves eps rho'' = psi'(rho)") {
  const CnoidalParams p = k_from_eps(1e-4);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = i / 10000.0;
    const double r = cnoidal_profile(p, x);
    worst = std::max(worst, std::abs(1e-4 * cnoidal_curvature(p, x) - 0.5 * (r - 1) * (r - 2) * (2 * r - 3)));
  }
  CHECK(worst <= 1e-8);
  CHECK(cnoidal_profile(p, 0.0) == doctest::Approx(1.5));
  CHECK(cnoidal_slope(p, 0.0) > 0.0);
  CHECK(cnoidal_profile(p, 0.37) == doctest::Approx(cnoidal_profile(p, 1.37)).epsilon(1e-12));
}

TEST_CASE("cnoidal derivatives match finite differences") {
  const CnoidalParams p = k_from_eps(1e-3);
  const double h = 1e-5;
  for (double x : {0.1, 0.3, 0.8}) {
    CHECK(cnoidal_slope(p, x) == doctest::Approx((cnoidal_profile(p, x + h) - cnoidal_profile(p, x - h)) / (2 * h)).epsilon(1e-7));
    CHECK(cnoidal_third(p, x) == doctest::Approx((cnoidal_curvature(p, x + h) - cnoidal_curvature(p, x - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("exact solution translates with ubar") {
  const CnoidalParams p = k_from_eps(1e-4);
  const FlowPoint a = exact_solution(p, 2.0, 0.3, 0.1);
  CHECK(a.rho == doctest::Approx(cnoidal_profile(p, 0.1)).epsilon(1e-14));
  CHECK(a.u == 2.0);
}
