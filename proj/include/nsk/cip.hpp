#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nsk/diagnostics.hpp"
#include "nsk/energy.hpp"
#include "nsk/hermite.hpp"
#include "nsk/state.hpp"

namespace nsk {

/// Initial data. `kind` is one of
///   "sine"     rho0 = 1.5 + amplitude sin(2 pi x),  u0 = ubar + flux / rho0
///   "cnoidal"  rho0 = cnoidal equilibrium at the run's eps, u0 = ubar
///   "constant" rho0 = 1.5 + amplitude, u0 = ubar
struct InitialCondition {
  std::string kind = "sine";
  double amplitude = 0.3;
  double ubar = 0.0;
  double flux = 0.0;
};

struct SimConfig {
  int nx = 300;
  double dt = 1.0 / 120000.0;
  double t_end = 25.0;
  double eps = 1e-4;
  double mu_bar = 0.1;  // 0 selects the Euler-Korteweg system
  EnergyModel energy = EnergyModel::quartic();
  InitialCondition init;
  long snapshot_every = 0;  // 0: only the final state
  long series_every = 1;
  bool cfl_check = true;  // true: abort on violation, false: warn
  std::string outdir = "out";

  /// Throws ConfigError on dt <= 0, nx < 8, eps <= 0 or mu_bar < 0.
  void validate() const;
  long num_steps() const;
};

/// Departure points and Jacobians of the backward characteristic map.
struct Characteristics {
  std::vector<double> feet;
  std::vector<double> jac;
};

/// Classical RK4 for dX/ds = w(X) traced backward over tau from every node,
/// with the variational equation dJ/ds = w_x(X) J integrated on the same
/// stages. With `cfl_check`, a stage displacement above one cell throws.
Characteristics trace_characteristics(const HermiteField& w, double tau,
                                      bool cfl_check = false);

/// rho <- I_h^3 (J * rho o X).
HermiteField advect_density(const HermiteField& rho, const Characteristics& chars);
/// u <- I_h^3 (u o X).
HermiteField advect_velocity(const HermiteField& u, const Characteristics& chars);

/// Subproblems 1 and 2 over tau with the current velocity.
FluidState advection_substep(const FluidState& state, double tau, bool cfl_check = false);

/// Explicit Euler update of u and u_x from viscosity, pressure and capillarity.
FluidState source_step(const FluidState& state, const SimConfig& cfg, double tau);

/// A(dt/2) B(dt) A(dt/2), advancing t by dt.
FluidState strang_step(const FluidState& state, const SimConfig& cfg);

FluidState initial_state(const SimConfig& cfg);

/// Total energy: integral of Psi(rho) + rho u^2 / 2 + eps rho_x^2 / 2.
double total_energy(const FluidState& state, const EnergyModel& model, double eps);

struct CflBounds {
  double advective;   // h / max|u|
  double dispersive;  // 2 h^2 / sqrt(55.58 eps max(rho))
  double viscous;     // 2 h^2 min(rho) / (245/12 mu_bar)
  double limit;       // 0.9 * min of the above
  bool ok(double dt) const { return dt <= limit; }
};

CflBounds cfl_bounds(const FluidState& state, const SimConfig& cfg);

/// Mid-density of the m = 0 wells, the level tracked as the interface.
double interface_level(const EnergyModel& model);

struct RunObserver {
  std::function<void(long step, const FluidState&)> on_snapshot;
  std::function<void(const std::string&)> on_warning;
};

struct RunResult {
  FluidState final_state;
  DiagnosticSeries series;
  long steps = 0;
  double initial_mass = 0.0;
  double max_mass_drift = 0.0;  // relative, over all recorded samples
};

/// Advance from the configured initial data to t_end.
RunResult run(const SimConfig& cfg, const RunObserver& observer = {});
/// Advance a given state by cfg.num_steps() steps.
RunResult run_from(FluidState state, const SimConfig& cfg, const RunObserver& observer = {});

}  // namespace nsk
