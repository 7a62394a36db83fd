#include "nsk/cip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nsk/elliptic.hpp"
#include "nsk/errors.hpp"
#include "nsk/quadrature.hpp"

namespace nsk {

void SimConfig::validate() const {
  std::ostringstream msg;
  if (!(dt > 0.0)) {
    msg << "dt must be positive (got " << dt << ")";
  } else if (nx < 8) {
    msg << "nx must be at least 8 (got " << nx << ")";
  } else if (!(eps > 0.0)) {
    msg << "eps must be positive (got " << eps << ")";
  } else if (!(mu_bar >= 0.0)) {
    msg << "mu_bar must be non-negative (got " << mu_bar << ")";
  } else if (!(t_end >= 0.0)) {
    msg << "t_end must be non-negative (got " << t_end << ")";
  } else if (series_every < 1) {
    msg << "series_every must be at least 1";
  } else if (snapshot_every < 0) {
    msg << "snapshot_every must be non-negative";
  } else {
    return;
  }
  throw ConfigError(msg.str());
}

long SimConfig::num_steps() const { return std::lround(t_end / dt); }

// ---------------------------------------------------------------------------
// Characteristics

Characteristics trace_characteristics(const HermiteField& w, double tau, bool cfl_check) {
  const PeriodicGrid& grid = w.grid();
  const int n = grid.nx();
  const double h = grid.h();
  Characteristics chars;
  chars.feet.resize(n);
  chars.jac.resize(n);

  // Backward time sigma = t - s: dX/dsigma = -w(X), dJ/dsigma = -w_x(X) J.
  for (int j = 0; j < n; ++j) {
    const double x0 = grid.node(j);
    double fx[4];
    double fj[4];
    double x = x0;
    double jac = 1.0;
    for (int stage = 0; stage < 4; ++stage) {
      const HermiteSample s = w.interp(x);
      fx[stage] = -s.value;
      fj[stage] = -s.deriv * jac;
      if (cfl_check && std::abs(tau * fx[stage]) > h) {
        std::ostringstream msg;
        msg << "CFL violation: characteristic stage moves " << std::abs(tau * fx[stage]) / h
            << " cells at node " << j;
        throw CflError(msg.str(), -1);
      }
      if (stage < 3) {
        const double frac = stage < 2 ? 0.5 : 1.0;
        x = x0 + frac * tau * fx[stage];
        jac = 1.0 + frac * tau * fj[stage];
      }
    }
    double foot = x0 + tau / 6.0 * (fx[0] + 2.0 * fx[1] + 2.0 * fx[2] + fx[3]);
    foot -= std::floor(foot);
    if (foot >= 1.0) {
      foot = 0.0;
    }
    chars.feet[j] = foot;
    chars.jac[j] = 1.0 + tau / 6.0 * (fj[0] + 2.0 * fj[1] + 2.0 * fj[2] + fj[3]);
  }
  return chars;
}

namespace {

void require_monotone(const Characteristics& chars) {
  for (std::size_t j = 0; j < chars.jac.size(); ++j) {
    if (!(chars.jac[j] > 0.0)) {
      std::ostringstream msg;
      msg << "characteristics cross at node " << j << " (J = " << chars.jac[j] << ")";
      throw CharacteristicCrossingError(msg.str(), -1);
    }
  }
}

}  // namespace

HermiteField advect_density(const HermiteField& rho, const Characteristics& chars) {
  require_monotone(chars);
  const PeriodicGrid& grid = rho.grid();
  const int n = grid.nx();
  const double h = grid.h();
  std::vector<double> values(n);
  std::vector<double> derivs(n);
  const auto& jac = chars.jac;
  for (int j = 0; j < n; ++j) {
    const HermiteSample s = rho.interp(chars.feet[j]);
    // Fourth-order central difference of the nodal Jacobians.
    // J' from the D2 stencil on the displacement pair (X - x, J - 1), so
    // that it sees both Hermite degrees of freedom.
    StencilWindow disp;
    disp.h = h;
    for (int o = -2; o <= 2; ++o) {
      const int k = grid.wrap(j + o);
      double d = chars.feet[k] - grid.node(k);
      d -= std::round(d);
      disp.v[o + 2] = d;
      disp.vx[o + 2] = jac[k] - 1.0;
    }
    const double djac = apply_stencil(StencilKind::D2, disp);
    values[j] = jac[j] * s.value;
    derivs[j] = djac * s.value + jac[j] * jac[j] * s.deriv;
  }
  return HermiteField(grid, std::move(values), std::move(derivs));
}

HermiteField advect_velocity(const HermiteField& u, const Characteristics& chars) {
  require_monotone(chars);
  const int n = u.grid().nx();
  std::vector<double> values(n);
  std::vector<double> derivs(n);
  for (int j = 0; j < n; ++j) {
    const HermiteSample s = u.interp(chars.feet[j]);
    values[j] = s.value;
    derivs[j] = chars.jac[j] * s.deriv;
  }
  return HermiteField(u.grid(), std::move(values), std::move(derivs));
}

FluidState advection_substep(const FluidState& state, double tau, bool cfl_check) {
  const Characteristics chars = trace_characteristics(state.u, tau, cfl_check);
  return FluidState{advect_density(state.rho, chars), advect_velocity(state.u, chars),
                    state.t};
}

// ---------------------------------------------------------------------------
// Source terms

FluidState source_step(const FluidState& state, const SimConfig& cfg, double tau) {
  const HermiteField& rho = state.rho;
  const HermiteField& u = state.u;
  const int n = rho.size();
  const EnergyModel& e = cfg.energy;
  const double mu = cfg.mu_bar;
  const double eps = cfg.eps;

  FluidState out{rho, u, state.t};
  auto new_u = out.u.values();
  auto new_ux = out.u.derivs();
  for (int j = 0; j < n; ++j) {
    const double r = rho.values()[j];
    if (!(r > 0.0)) {
      std::ostringstream msg;
      msg << "vacuum: rho = " << r << " at node " << j;
      throw VacuumError(msg.str(), -1);
    }
    const double rx = rho.derivs()[j];
    const StencilWindow rw = window_at(rho, j);
    const double rho_xx = apply_stencil(StencilKind::D2, rw);
    const double rho_xxx = apply_stencil(StencilKind::D3, rw);
    const double rho_xxxx = apply_stencil(StencilKind::D4, rw);
    const double p2 = e.d2psi(r);
    const double p3 = e.d3psi(r);

    double visc = 0.0;
    double visc_x = 0.0;
    if (mu != 0.0) {
      const StencilWindow uw = window_at(u, j);
      const double u_xx = apply_stencil(StencilKind::D2, uw);
      const double u_xxx = apply_stencil(StencilKind::D3, uw);
      visc = mu * u_xx / r;
      visc_x = mu * (u_xxx / r - rx * u_xx / (r * r));
    }
    new_u[j] += tau * (visc - p2 * rx + eps * rho_xxx);
    new_ux[j] += tau * (visc_x - p2 * rho_xx - p3 * rx * rx + eps * rho_xxxx);
  }
  return out;
}

FluidState strang_step(const FluidState& state, const SimConfig& cfg) {
  const double half = 0.5 * cfg.dt;
  FluidState s = advection_substep(state, half, cfg.cfl_check);
  s = source_step(s, cfg, cfg.dt);
  s = advection_substep(s, half, cfg.cfl_check);
  s.t = state.t + cfg.dt;
  return s;
}

// ---------------------------------------------------------------------------
// Setup and monitoring

FluidState initial_state(const SimConfig& cfg) {
  const PeriodicGrid grid(cfg.nx);
  const InitialCondition& ic = cfg.init;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  HermiteField rho(grid);
  if (ic.kind == "sine") {
    rho = sample([&](double x) { return 1.5 + ic.amplitude * std::sin(kTwoPi * x); },
                 [&](double x) { return kTwoPi * ic.amplitude * std::cos(kTwoPi * x); }, grid);
  } else if (ic.kind == "cnoidal") {
    const CnoidalParams p = k_from_eps(cfg.eps);
    rho = sample([&](double x) { return cnoidal_profile(p, x); },
                 [&](double x) { return cnoidal_slope(p, x); }, grid);
  } else if (ic.kind == "constant") {
    rho = sample([&](double) { return 1.5 + ic.amplitude; }, [](double) { return 0.0; }, grid);
  } else {
    throw ConfigError("unknown initial condition '" + ic.kind + "'");
  }

  // u0 = ubar + flux / rho0, so that rho0 (u0 - ubar) = flux.
  HermiteField u(grid);
  for (int j = 0; j < grid.nx(); ++j) {
    const double r = rho.values()[j];
    u.values()[j] = ic.ubar + ic.flux / r;
    u.derivs()[j] = -ic.flux * rho.derivs()[j] / (r * r);
  }
  return FluidState{std::move(rho), std::move(u), 0.0};
}

double total_energy(const FluidState& state, const EnergyModel& model, double eps) {
  const PeriodicGrid& grid = state.grid();
  const double h = grid.h();
  double total = 0.0;
  for (int j = 0; j < grid.nx(); ++j) {
    const double x0 = grid.node(j);
    total += quad::gauss5(
        [&](double x) {
          const HermiteSample r = state.rho.interp(x);
          const double u = state.u.interp(x).value;
          return model.psi(r.value) + 0.5 * r.value * u * u + 0.5 * eps * r.deriv * r.deriv;
        },
        x0, x0 + h);
  }
  return total;
}

CflBounds cfl_bounds(const FluidState& state, const SimConfig& cfg) {
  const double h = state.grid().h();
  double umax = 0.0;
  double rmin = std::numeric_limits<double>::infinity();
  double rmax = 0.0;
  for (int j = 0; j < state.rho.size(); ++j) {
    umax = std::max(umax, std::abs(state.u.values()[j]));
    rmin = std::min(rmin, state.rho.values()[j]);
    rmax = std::max(rmax, state.rho.values()[j]);
  }
  const double inf = std::numeric_limits<double>::infinity();
  CflBounds b;
  b.advective = umax > 0.0 ? h / umax : inf;
  // Spectral radii of the Hermite-pair stencils: h^2 [D2; D3] reaches
  // 245/12, h^4 [D3; D4] about 55.6. Explicit Euler needs radius * dt <= 2.
  constexpr double kViscRadius = 245.0 / 12.0;
  constexpr double kDispRadius = 55.58;
  b.dispersive = 2.0 * h * h / std::sqrt(kDispRadius * rmax * cfg.eps);
  b.viscous = cfg.mu_bar > 0.0 ? 2.0 * h * h * rmin / (kViscRadius * cfg.mu_bar) : inf;
  b.limit = 0.9 * std::min({b.advective, b.dispersive, b.viscous});
  return b;
}

namespace {

void check_health(const FluidState& s, long step) {
  for (int j = 0; j < s.rho.size(); ++j) {
    const double r = s.rho.values()[j];
    if (!std::isfinite(r) || !std::isfinite(s.u.values()[j]) ||
        !std::isfinite(s.rho.derivs()[j]) || !std::isfinite(s.u.derivs()[j])) {
      std::ostringstream msg;
      msg << "blow-up: non-finite value at node " << j << " after step " << step;
      throw BlowUpError(msg.str(), step);
    }
    if (!(r > 0.0)) {
      std::ostringstream msg;
      msg << "vacuum: rho = " << r << " at node " << j << " after step " << step;
      throw VacuumError(msg.str(), step);
    }
  }
}

}  // namespace

double interface_level(const EnergyModel& model) {
  try {
    return bitangent(model.with_momentum(0.0)).mid();
  } catch (const NoBitangentError&) {
    return 1.5;
  }
}

RunResult run_from(FluidState state, const SimConfig& cfg, const RunObserver& observer) {
  cfg.validate();
  const long steps = cfg.num_steps();
  const double level = interface_level(cfg.energy);
  const double t0 = state.t;

  RunResult result{state, {}, 0, state.rho.integral(), 0.0};
  std::optional<double> last_xbar;
  bool warned = false;

  auto check_cfl = [&](const FluidState& s, long step) {
    const CflBounds b = cfl_bounds(s, cfg);
    if (b.ok(cfg.dt)) {
      return;
    }
    std::ostringstream msg;
    msg << "dt = " << cfg.dt << " exceeds the stability bound " << b.limit << " at step "
        << step;
    if (cfg.cfl_check) {
      throw CflError(msg.str(), step);
    }
    if (!warned && observer.on_warning) {
      observer.on_warning(msg.str());
    }
    warned = true;
  };

  auto record = [&](const FluidState& s) {
    const double mass = s.rho.integral();
    last_xbar = interface_position(s.rho, level, last_xbar);
    result.series.append(s.t, mass, total_energy(s, cfg.energy, cfg.eps),
                         last_xbar.value_or(std::numeric_limits<double>::quiet_NaN()),
                         FluxMoments::of(s));
    result.max_mass_drift = std::max(
        result.max_mass_drift, std::abs(mass - result.initial_mass) / result.initial_mass);
  };

  check_cfl(state, 0);
  record(state);
  if (observer.on_snapshot && cfg.snapshot_every > 0) {
    observer.on_snapshot(0, state);
  }

  for (long step = 1; step <= steps; ++step) {
    try {
      state = strang_step(state, cfg);
    } catch (const SimulationError& err) {
      // Stage-level errors do not know the step index.
      if (dynamic_cast<const CflError*>(&err)) throw CflError(err.what(), step);
      if (dynamic_cast<const VacuumError*>(&err)) throw VacuumError(err.what(), step);
      if (dynamic_cast<const CharacteristicCrossingError*>(&err))
        throw CharacteristicCrossingError(err.what(), step);
      throw;
    }
    state.t = t0 + step * cfg.dt;
    check_health(state, step);
    if (step % cfg.series_every == 0 || step == steps) {
      record(state);
      check_cfl(state, step);
    }
    if (observer.on_snapshot && cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) {
      observer.on_snapshot(step, state);
    }
  }
  result.series.finalize();
  result.steps = steps;
  result.final_state = std::move(state);
  return result;
}

RunResult run(const SimConfig& cfg, const RunObserver& observer) {
  cfg.validate();
  return run_from(initial_state(cfg), cfg, observer);
}

}  // namespace nsk
