#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "nsk/energy.hpp"
#include "nsk/hermite.hpp"
#include "nsk/state.hpp"

namespace nsk {

/// Nodal moments from which the flux rho (u - c) statistics follow for any c.
struct FluxMoments {
  double mean_rho = 0.0;
  double mean_m = 0.0;  // m = rho u
  double var_rho = 0.0;
  double var_m = 0.0;
  double cov = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double max_abs_u = 0.0;

  static FluxMoments of(const FluidState& state);
  double flux_mean(double c) const { return mean_m - c * mean_rho; }
  double flux_std(double c) const;
};

/// Time series of the monitored quantities. `c_interface` is the raw centred
/// difference of the unwrapped interface position; `c_smoothed` its 5-point
/// moving average.
struct DiagnosticSeries {
  std::vector<double> t;
  std::vector<double> mass;
  std::vector<double> energy;
  std::vector<double> xbar;
  std::vector<double> c_interface;
  std::vector<double> c_smoothed;
  std::vector<double> flux_mean;
  std::vector<double> flux_std;
  std::vector<double> umax;
  std::vector<double> rhomin;
  std::vector<double> rhomax;
  std::vector<FluxMoments> moments;

  std::size_t size() const noexcept { return t.size(); }

  /// Record one sample; xbar is NaN when there is no interface.
  void append(double time, double mass_value, double energy_value, double xbar_value,
              const FluxMoments& m);

  /// Fill c_interface / c_smoothed from xbar and the flux columns from them.
  void finalize();

  /// Time-averaged spatial-mean flux over the trailing `fraction` of samples.
  double trailing_flux(double fraction = 0.1) const;
  /// Mean smoothed interface speed over the trailing `fraction` of samples.
  double trailing_speed(double fraction = 0.1) const;

  void write_csv(std::ostream& out) const;
};

/// Leftmost upcrossing of `level` (or, given `previous`, the upcrossing
/// nearest to it on the torus). Empty when rho never crosses upward.
std::optional<double> interface_position(const HermiteField& rho, double level = 1.5,
                                         std::optional<double> previous = std::nullopt);

/// Remove jumps larger than 1/2 between consecutive positions.
std::vector<double> unwrap_positions(std::span<const double> xbar);

/// Centred differences in the interior, one-sided at the ends. Needs >= 3 samples.
std::vector<double> interface_velocity(std::span<const double> t, std::span<const double> xbar);

std::vector<double> moving_average(std::span<const double> values, int width = 5);

struct FluxStats {
  double mean;
  double std;
  double min;
  double max;
};

/// rho (u - c) at the nodes.
std::vector<double> mass_flux(const FluidState& state, double c);
FluxStats flux_stats(std::span<const double> flux);

struct TangentLine {
  double slope;
  double intercept;
};

struct BitangencyReport {
  double m_est;
  double rho_min;
  double rho_max;
  TangentLine at_min;
  TangentLine at_max;
  double slope_diff;
  double intercept_diff;
};

/// Tangent lines of Psi^{m_est} at the extreme densities of the state.
BitangencyReport bitangency_check(const FluidState& state, const EnergyModel& energy,
                                  double m_est);
/// Same, with m_est taken as the spatial-mean flux for interface speed c.
BitangencyReport bitangency_check_at_speed(const FluidState& state,
                                           const EnergyModel& energy, double c);

struct StationarityIntegrals {
  double boundary;     // integral of d/dx{m^2 v^2/2 + Psi' - v mu v_x - eps rho_xx}
  double dissipation;  // integral of mu |v_x|^2, v = 1/rho
};

/// Both terms of the integrated stationarity identity for a periodic field;
/// a steady state needs boundary + m * dissipation = 0.
StationarityIntegrals stationarity_identity(const HermiteField& rho, double m, double mu_bar,
                                            double eps,
                                            const EnergyModel& energy = EnergyModel::quartic());

}  // namespace nsk
