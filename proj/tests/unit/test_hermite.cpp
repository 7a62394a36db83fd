#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nsk/errors.hpp"
#include "nsk/hermite.hpp"

using namespace nsk;

TEST_CASE("derivative stencils are exact through quartics") {
  for (StencilKind k : {StencilKind::D2, StencilKind::D3, StencilKind::D4}) {
    const ExactnessReport r = exactness_gate(k, 4);
    CHECK(r.certified_degree >= 4);
  }
  CHECK_NOTHROW(certify_stencils());
}

TEST_CASE("fourth derivative with the printed coefficients fails") {
  CHECK(exactness_gate(StencilKind::D4Printed, 4).certified_degree < 4);
}

TEST_CASE("stencils hit analytic derivatives of a smooth periodic field") {
  const double tp = 2 * std::numbers::pi;
  auto err = [&](int nx) {
    const HermiteField f = sample([&](double x) { return std::sin(tp * x); },
                                  [&](double x) { return tp * std::cos(tp * x); }, PeriodicGrid(nx));
    double e = 0;
    for (int j = 0; j < nx; ++j) {
      const double x = f.grid().node(j);
      e = std::max(e, std::abs(d3(f, j) + tp * tp * tp * std::cos(tp * x)));
    }
    return e;
  };
  const double e1 = err(8), e2 = err(16);
  CHECK(e2 < e1 / 8);
  CHECK(err(64) <= 1e-6 * tp * tp * tp);
}

TEST_CASE("Hermite interpolation reproduces cubics on a cell") {
  // periodic data cannot hold a global cubic; use a cubic spline-free check on one cell
  const PeriodicGrid g(10);
  std::vector<double> v(10, 0.0), d(10, 0.0);
  auto f = [](double x) { return 1 + x - 3 * x * x + 2 * x * x * x; };
  auto df = [](double x) { return 1 - 6 * x + 6 * x * x; };
  v[2] = f(0.2); d[2] = df(0.2); v[3] = f(0.3); d[3] = df(0.3);
  const HermiteField h(g, v, d);
  for (double x : {0.2, 0.23, 0.27, 0.2999}) {
    CHECK(h.interp(x).value == doctest::Approx(f(x)).epsilon(1e-13));
    CHECK(h.interp(x).deriv == doctest::Approx(df(x)).epsilon(1e-12));
    CHECK(h.interp_second(x) == doctest::Approx(-6 + 12 * x).epsilon(1e-10));
  }
}

TEST_CASE("integral of periodic Hermite data is h times the node sum") {
  const HermiteField f = sample([](double x) { return 2 + std::cos(2 * std::numbers::pi * x); },
                                [](double x) { return -2 * std::numbers::pi * std::sin(2 * std::numbers::pi * x); },
                                PeriodicGrid(32));
  CHECK(f.integral() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("field CSV round trip") {
  const HermiteField f = sample([](double x) { return std::exp(std::sin(6.283185307179586 * x)); },
                                [](double x) { return 6.283185307179586 * std::cos(6.283185307179586 * x) * std::exp(std::sin(6.283185307179586 * x)); },
                                PeriodicGrid(16));
  std::stringstream s;
  write_csv(s, f);
  const HermiteField g = read_field_csv(s);
  for (int j = 0; j < 16; ++j) {
    CHECK(g.value(j) == f.value(j));
    CHECK(g.deriv(j) == f.deriv(j));
  }
  std::stringstream bad("x,v,v_x\n0,1\n");
  CHECK_THROWS_AS(read_field_csv(bad), ConfigError);
}

TEST_CASE("periodic wrap") {
  const PeriodicGrid g(7);
  CHECK(g.wrap(-1) == 6);
  CHECK(g.wrap(7) == 0);
  CHECK(g.wrap(-15) == 6);
}
