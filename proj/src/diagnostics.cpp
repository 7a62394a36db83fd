#include "nsk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "nsk/quadrature.hpp"

namespace nsk {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

FluxMoments FluxMoments::of(const FluidState& state) {
  const auto rho = state.rho.values();
  const auto u = state.u.values();
  const double n = static_cast<double>(rho.size());
  FluxMoments fm;
  fm.min_rho = std::numeric_limits<double>::infinity();
  fm.max_rho = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < rho.size(); ++j) {
    fm.mean_rho += rho[j];
    fm.mean_m += rho[j] * u[j];
    fm.min_rho = std::min(fm.min_rho, rho[j]);
    fm.max_rho = std::max(fm.max_rho, rho[j]);
    fm.max_abs_u = std::max(fm.max_abs_u, std::abs(u[j]));
  }
  fm.mean_rho /= n;
  fm.mean_m /= n;
  // Second pass about the means: avoids cancellation in the variances.
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double dr = rho[j] - fm.mean_rho;
    const double dm = rho[j] * u[j] - fm.mean_m;
    fm.var_rho += dr * dr;
    fm.var_m += dm * dm;
    fm.cov += dr * dm;
  }
  fm.var_rho /= n;
  fm.var_m /= n;
  fm.cov /= n;
  return fm;
}

double FluxMoments::flux_std(double c) const {
  return std::sqrt(std::max(0.0, var_m - 2.0 * c * cov + c * c * var_rho));
}

// ---------------------------------------------------------------------------
// Series

void DiagnosticSeries::append(double time, double mass_value, double energy_value,
                              double xbar_value, const FluxMoments& m) {
  t.push_back(time);
  mass.push_back(mass_value);
  energy.push_back(energy_value);
  xbar.push_back(xbar_value);
  moments.push_back(m);
  umax.push_back(m.max_abs_u);
  rhomin.push_back(m.min_rho);
  rhomax.push_back(m.max_rho);
}

void DiagnosticSeries::finalize() {
  const std::size_t n = size();
  xbar = unwrap_positions(xbar);
  if (n >= 3) {
    c_interface = interface_velocity(t, xbar);
  } else {
    c_interface.assign(n, n == 2 ? (xbar[1] - xbar[0]) / (t[1] - t[0]) : 0.0);
  }
  c_smoothed = moving_average(c_interface, 5);
  flux_mean.resize(n);
  flux_std.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Without an interface the flux is taken in the lab frame.
    const double c = std::isfinite(c_smoothed[i]) ? c_smoothed[i] : 0.0;
    flux_mean[i] = moments[i].flux_mean(c);
    flux_std[i] = moments[i].flux_std(c);
  }
}

namespace {

std::size_t trailing_start(std::size_t n, double fraction) {
  const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  return n - std::clamp<std::size_t>(count, 1, n);
}

double finite_mean(std::span<const double> v, std::size_t from) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = from; i < v.size(); ++i) {
    if (std::isfinite(v[i])) {
      sum += v[i];
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : kNaN;
}

}  // namespace

double DiagnosticSeries::trailing_flux(double fraction) const {
  if (flux_mean.empty()) {
    return kNaN;
  }
  return finite_mean(flux_mean, trailing_start(flux_mean.size(), fraction));
}

double DiagnosticSeries::trailing_speed(double fraction) const {
  if (c_smoothed.empty()) {
    return kNaN;
  }
  return finite_mean(c_smoothed, trailing_start(c_smoothed.size(), fraction));
}

void DiagnosticSeries::write_csv(std::ostream& out) const {
  out << "t,mass,energy,xbar,c_interface,flux_mean,flux_std,umax,rhomin,rhomax\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    const double c = i < c_interface.size() ? c_interface[i] : kNaN;
    const double fm = i < flux_mean.size() ? flux_mean[i] : kNaN;
    const double fs = i < flux_std.size() ? flux_std[i] : kNaN;
    out << t[i] << ',' << mass[i] << ',' << energy[i] << ',' << xbar[i] << ',' << c << ','
        << fm << ',' << fs << ',' << umax[i] << ',' << rhomin[i] << ',' << rhomax[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Interface tracking

namespace {

double torus_distance(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

// Root of the Hermite cubic in [a, b] where g(a) < 0 <= g(b).
double refine_root(const HermiteField& rho, double level, double a, double b) {
  double x = 0.5 * (a + b);
  for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
    const HermiteSample s = rho.interp(x);
    const double g = s.value - level;
    if (g < 0.0) {
      a = x;
    } else {
      b = x;
    }
    // Newton proposal, kept only when it stays inside the bracket.
    double next = s.deriv != 0.0 ? x - g / s.deriv : 0.5 * (a + b);
    if (!(next > a && next < b)) {
      next = 0.5 * (a + b);
    }
    if (std::abs(next - x) < 1e-14) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace

std::optional<double> interface_position(const HermiteField& rho, double level,
                                         std::optional<double> previous) {
  const PeriodicGrid& grid = rho.grid();
  const double h = grid.h();
  constexpr int kSub = 4;
  constexpr double kBump = 4.0 / 27.0;  // max of t (1-t)^2 on [0, 1]

  std::optional<double> best;
  auto consider = [&](double x) {
    x -= std::floor(x);
    if (x >= 1.0) {
      x = 0.0;
    }
    if (!best) {
      best = x;
    } else if (previous) {
      if (torus_distance(x, *previous) < torus_distance(*best, *previous)) best = x;
    } else if (x < *best) {
      best = x;
    }
  };

  for (int j = 0; j < grid.nx(); ++j) {
    const double g0 = rho.value(j) - level;
    const double g1 = rho.value(j + 1) - level;
    // The cubic stays within this band of its endpoint values.
    const double band = kBump * h * (std::abs(rho.deriv(j)) + std::abs(rho.deriv(j + 1)));
    if (std::min(g0, g1) > band || std::max(g0, g1) < -band) {
      continue;
    }
    const double x0 = grid.node(j);
    double ga = g0;
    for (int s = 1; s <= kSub; ++s) {
      const double a = x0 + (s - 1) * h / kSub;
      const double b = x0 + s * h / kSub;
      const double gb = s == kSub ? g1 : rho.interp(b).value - level;
      if (ga < 0.0 && gb >= 0.0) {
        consider(gb == 0.0 ? b : refine_root(rho, level, a, b));
      }
      ga = gb;
    }
  }
  return best;
}

std::vector<double> unwrap_positions(std::span<const double> xbar) {
  std::vector<double> out(xbar.begin(), xbar.end());
  double offset = 0.0;
  double last = kNaN;
  for (double& x : out) {
    if (!std::isfinite(x)) {
      continue;
    }
    if (std::isfinite(last)) {
      const double jump = x + offset - last;
      offset -= std::round(jump);
    }
    x += offset;
    last = x;
  }
  return out;
}

std::vector<double> interface_velocity(std::span<const double> t, std::span<const double> xbar) {
  const std::size_t n = t.size();
  std::vector<double> c(n, kNaN);
  if (n < 3) {
    return c;
  }
  c[0] = (xbar[1] - xbar[0]) / (t[1] - t[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    c[i] = (xbar[i + 1] - xbar[i - 1]) / (t[i + 1] - t[i - 1]);
  }
  c[n - 1] = (xbar[n - 1] - xbar[n - 2]) / (t[n - 1] - t[n - 2]);
  return c;
}

std::vector<double> moving_average(std::span<const double> values, int width) {
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const std::ptrdiff_t half = width / 2;
  std::vector<double> out(values.size(), kNaN);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    double sum = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) {
      sum += values[k];
    }
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flux

std::vector<double> mass_flux(const FluidState& state, double c) {
  const auto rho = state.rho.values();
  const auto u = state.u.values();
  std::vector<double> flux(rho.size());
  for (std::size_t j = 0; j < rho.size(); ++j) {
    flux[j] = rho[j] * (u[j] - c);
  }
  return flux;
}

FluxStats flux_stats(std::span<const double> flux) {
  if (flux.empty()) {
    return {kNaN, kNaN, kNaN, kNaN};
  }
  const auto [lo, hi] = std::minmax_element(flux.begin(), flux.end());
  double mean = 0.0;
  for (double f : flux) mean += f;
  mean /= static_cast<double>(flux.size());
  double var = 0.0;
  for (double f : flux) var += (f - mean) * (f - mean);
  var /= static_cast<double>(flux.size());
  return {mean, std::sqrt(var), *lo, *hi};
}

// ---------------------------------------------------------------------------
// Bitangency

BitangencyReport bitangency_check(const FluidState& state, const EnergyModel& energy,
                                  double m_est) {
  const EnergyModel model = energy.with_momentum(m_est);
  const auto rho = state.rho.values();
  const auto [lo, hi] = std::minmax_element(rho.begin(), rho.end());
  auto tangent = [&](double r) {
    const double slope = d_psi_m(model, r);
    return TangentLine{slope, psi_m(model, r) - slope * r};
  };
  BitangencyReport rep;
  rep.m_est = m_est;
  rep.rho_min = *lo;
  rep.rho_max = *hi;
  rep.at_min = tangent(*lo);
  rep.at_max = tangent(*hi);
  rep.slope_diff = std::abs(rep.at_max.slope - rep.at_min.slope);
  rep.intercept_diff = std::abs(rep.at_max.intercept - rep.at_min.intercept);
  return rep;
}

BitangencyReport bitangency_check_at_speed(const FluidState& state, const EnergyModel& energy,
                                           double c) {
  return bitangency_check(state, energy, FluxMoments::of(state).flux_mean(c));
}

// ---------------------------------------------------------------------------
// Stationarity identity

StationarityIntegrals stationarity_identity(const HermiteField& rho, double m, double mu_bar,
                                            double eps, const EnergyModel& energy) {
  const PeriodicGrid& grid = rho.grid();
  const int n = grid.nx();
  const double h = grid.h();

  // Bracket {m^2 v^2/2 + Psi' - v mu v_x - eps rho_xx} at the nodes.
  std::vector<double> bracket(n);
  for (int j = 0; j < n; ++j) {
    const double r = rho.values()[j];
    const double v = 1.0 / r;
    const double v_x = -rho.derivs()[j] / (r * r);
    bracket[j] = 0.5 * m * m * v * v + energy.dpsi(r) - v * mu_bar * v_x - eps * d2(rho, j);
  }
  double boundary = 0.0;
  for (int j = 0; j < n; ++j) {
    boundary += bracket[grid.wrap(j + 1)] - bracket[j];
  }

  double dissipation = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x0 = grid.node(j);
    dissipation += quad::gauss5(
        [&](double x) {
          const HermiteSample s = rho.interp(x);
          const double v_x = s.deriv / (s.value * s.value);
          return v_x * v_x;
        },
        x0, x0 + h);
  }
  return {boundary, mu_bar * dissipation};
}

}  // namespace nsk
