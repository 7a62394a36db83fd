#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "nsk/diagnostics.hpp"
#include "nsk/elliptic.hpp"

using namespace nsk;

namespace {

FluidState uniform_flow(const HermiteField& rho, double u0) {
  return FluidState{rho, sample([=](double) { return u0; }, [](double) { return 0.0; }, rho.grid()), 0.0};
}

}  // namespace

TEST_CASE("interface of a shifted cnoidal wave") {
  const CnoidalParams p = k_from_eps(1e-4);
  const HermiteField rho = sample([&](double x) { return cnoidal_profile(p, x - 0.3); },
                                  [&](double x) { return cnoidal_slope(p, x - 0.3); }, PeriodicGrid(300));
  const auto x = interface_position(rho);
  REQUIRE(x.has_value());
  CHECK(*x == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("no interface without an upcrossing") {
  const HermiteField rho = sample([](double) { return 1.2; }, [](double) { return 0.0; }, PeriodicGrid(20));
  CHECK_FALSE(interface_position(rho).has_value());
}

TEST_CASE("nearest upcrossing is preferred given a previous position") {
  const double tp = 2 * std::numbers::pi;
  // two upcrossings of 1.5 at x = 0 and x = 0.5
  const HermiteField rho = sample([&](double x) { return 1.5 + 0.3 * std::sin(2 * tp * x); },
                                  [&](double x) { return 0.6 * tp * std::cos(2 * tp * x); }, PeriodicGrid(200));
  CHECK(*interface_position(rho, 1.5, 0.45) == doctest::Approx(0.5).epsilon(1e-10));
  const double near0 = *interface_position(rho, 1.5, 0.97);
  CHECK(std::min(near0, 1.0 - near0) <= 1e-10);
}

TEST_CASE("unwrap and velocity") {
  const std::vector<double> raw{0.8, 0.9, 0.0, 0.1, 0.2};
  const auto xs = unwrap_positions(raw);
  CHECK(xs[2] == doctest::Approx(1.0));
  CHECK(xs[4] == doctest::Approx(1.2));
  const std::vector<double> t{0.0, 0.1, 0.2, 0.3, 0.4};
  for (double v : interface_velocity(t, xs)) CHECK(v == doctest::Approx(1.0));
  const auto avg = moving_average(std::vector<double>{1, 2, 3, 4, 5}, 3);
  CHECK(avg[2] == doctest::Approx(3.0));
}

TEST_CASE("flux statistics") {
  const HermiteField rho = sample([](double x) { return 1.5 + 0.1 * std::cos(2 * std::numbers::pi * x); },
                                  [](double x) { return -0.2 * std::numbers::pi * std::sin(2 * std::numbers::pi * x); },
                                  PeriodicGrid(64));
  const FluidState s = uniform_flow(rho, 0.4);
  const FluxStats st = flux_stats(mass_flux(s, 0.4));
  CHECK(std::abs(st.mean) <= 1e-15);
  CHECK(st.std <= 1e-15);
  const FluxMoments m = FluxMoments::of(s);
  CHECK(m.flux_mean(0.0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(m.flux_std(0.4) <= 1e-12);
  CHECK(m.flux_std(0.0) == doctest::Approx(flux_stats(mass_flux(s, 0.0)).std).epsilon(1e-9));
}

TEST_CASE("bitangency of the m = 0 wells") {
  const HermiteField rho = sample([](double x) { return 1.5 + 0.5 * std::cos(2 * std::numbers::pi * x); },
                                  [](double x) { return -std::numbers::pi * std::sin(2 * std::numbers::pi * x); },
                                  PeriodicGrid(64));
  const BitangencyReport r = bitangency_check(uniform_flow(rho, 0.0), EnergyModel::quartic(), 0.0);
  CHECK(std::abs(r.slope_diff) <= 1e-12);
  CHECK(std::abs(r.intercept_diff) <= 1e-12);
  CHECK(r.rho_min == doctest::Approx(1.0));
  CHECK(r.rho_max == doctest::Approx(2.0));
}

TEST_CASE("stationarity identity vanishes on a constant field") {
  const HermiteField rho = sample([](double) { return 1.3; }, [](double) { return 0.0; }, PeriodicGrid(32));
  const StationarityIntegrals s = stationarity_identity(rho, 0.1, 0.1, 1e-4);
  CHECK(std::abs(s.boundary) <= 1e-14);
  CHECK(std::abs(s.dissipation) <= 1e-14);
}

TEST_CASE("dissipation integral matches quadrature") {
  const double tp = 2 * std::numbers::pi;
  const HermiteField rho = sample([&](double x) { return 1.5 + 0.2 * std::sin(tp * x); },
                                  [&](double x) { return 0.2 * tp * std::cos(tp * x); }, PeriodicGrid(400));
  const StationarityIntegrals s = stationarity_identity(rho, 0.0, 0.1, 1e-4);
  double ref = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    const double r = 1.5 + 0.2 * std::sin(tp * x);
    const double vx = -0.2 * tp * std::cos(tp * x) / (r * r);
    ref += 0.1 * vx * vx / n;
  }
  CHECK(s.dissipation == doctest::Approx(ref).epsilon(1e-6));
  CHECK(std::abs(s.boundary) <= 1e-10);
}

TEST_CASE("series CSV has a header and one row per sample") {
  DiagnosticSeries d;
  const HermiteField rho = sample([](double) { return 1.5; }, [](double) { return 0.0; }, PeriodicGrid(8));
  const FluidState s = uniform_flow(rho, 0.0);
  for (int i = 0; i < 4; ++i) d.append(0.1 * i, 1.5, 0.0, 0.1 * i, FluxMoments::of(s));
  d.finalize();
  CHECK(d.c_interface[1] == doctest::Approx(1.0));
  std::stringstream out;
  d.write_csv(out);
  std::string line;
  int lines = 0;
  while (std::getline(out, line)) ++lines;
  CHECK(lines == 5);
}
