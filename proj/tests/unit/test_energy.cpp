#include <doctest.h>

#include <cmath>

#include "nsk/energy.hpp"
#include "nsk/errors.hpp"

using namespace nsk;

namespace {
double fd(const std::function<double(double)>& f, double x, double h = 1e-5) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}
}  // namespace

TEST_CASE("quartic derivatives agree with finite differences") {
  const EnergyModel e = EnergyModel::quartic(0.3);
  for (double r : {0.7, 1.0, 1.37, 2.0, 2.6}) {
    CHECK(d_psi_m(e, r) == doctest::Approx(fd([&](double s) { return psi_m(e, s); }, r)).epsilon(1e-9));
    CHECK(d2_psi_m(e, r) == doctest::Approx(fd([&](double s) { return d_psi_m(e, s); }, r)).epsilon(1e-9));
    CHECK(e.d3psi(r) == doctest::Approx(fd(e.d2psi, r)).epsilon(1e-9));
  }
}

TEST_CASE("pressure is rho psi' - psi and its slope rho psi''") {
  const EnergyModel e = EnergyModel::quartic();
  for (double r : {0.9, 1.5, 2.2}) {
    const double expect = r * 0.5 * (r - 1) * (r - 2) * (2 * r - 3) - 0.25 * std::pow((r - 1) * (r - 2), 2);
    CHECK(pressure(e, r) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(d_pressure(e, r) == doctest::Approx(fd([&](double s) { return pressure(e, s); }, r)).epsilon(1e-9));
  }
}

TEST_CASE("m = 0 wells sit at 1 and 2 on the axis") {
  const Bitangent b = bitangent(EnergyModel::quartic());
  CHECK(b.rho_g == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b.rho_l == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(b.slope) < 1e-12);
  CHECK(std::abs(b.intercept) < 1e-12);
}

TEST_CASE("bitangent with momentum touches psi^m twice") {
  const EnergyModel e = EnergyModel::quartic(0.2);
  const Bitangent b = bitangent(e);
  CHECK(b.rho_g < b.rho_l);
  CHECK(d_psi_m(e, b.rho_g) == doctest::Approx(b.slope).epsilon(1e-10));
  CHECK(d_psi_m(e, b.rho_l) == doctest::Approx(b.slope).epsilon(1e-10));
  CHECK(psi_m(e, b.rho_g) == doctest::Approx(b.line(b.rho_g)).epsilon(1e-10));
  CHECK(psi_m(e, b.rho_l) == doctest::Approx(b.line(b.rho_l)).epsilon(1e-10));
  // the line stays below psi^m in between
  for (double r = b.rho_g; r <= b.rho_l; r += 0.01) CHECK(psi_m(e, r) >= b.line(r) - 1e-12);
}

TEST_CASE("huge momentum destroys the double well") {
  CHECK_THROWS_AS(bitangent(EnergyModel::quartic(5.0)), NoBitangentError);
}

TEST_CASE("surface tension of the quartic well") {
  // sqrt(2 W) = (rho - 1)(2 - rho) / sqrt(2); its integral over [1, 2] is 1 / (6 sqrt 2)
  const EnergyModel e = EnergyModel::quartic();
  CHECK(sigma(e, bitangent(e)) == doctest::Approx(1.0 / (6.0 * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("double well vanishes at both phases and is C2 past the window") {
  const EnergyModel e = EnergyModel::quartic(0.1);
  const DoubleWell w(e, bitangent(e));
  CHECK(std::abs(w.value(w.bitangent().rho_g)) < 1e-14);
  CHECK(std::abs(w.value(w.bitangent().rho_l)) < 1e-14);
  const double edge = w.window_hi();
  CHECK(w.value(edge + 1e-9) == doctest::Approx(w.value(edge - 1e-9)).epsilon(1e-7));
  CHECK(w.second(edge + 1e-9) == doctest::Approx(w.second(edge - 1e-9)).epsilon(1e-6));
  CHECK(w.value(edge + 3.0) > w.value(edge));
}

TEST_CASE("phase variable maps the wells to -1 and +1") {
  const Bitangent b = bitangent(EnergyModel::quartic(0.1));
  CHECK(to_phase_variable(b, b.rho_g) == doctest::Approx(-1.0));
  CHECK(to_phase_variable(b, b.rho_l) == doctest::Approx(1.0));
  CHECK(from_phase_variable(b, to_phase_variable(b, 1.234)) == doctest::Approx(1.234));
}

TEST_CASE("psi^m rejects nonpositive densities") {
  CHECK_THROWS_AS(psi_m(EnergyModel::quartic(0.1), 0.0), DomainError);
}
