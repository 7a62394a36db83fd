#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nsk/energy.hpp"
#include "nsk/hermite.hpp"

namespace nsk {

/// One period of a periodic travelling-wave profile (or a window of a kink).
struct WaveProfile {
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> rho_x;
  double omega = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  double m = 0.0;
  double average = std::numeric_limits<double>::quiet_NaN();
  double c = 0.0;
  double eps = 0.0;

  bool periodic() const { return omega < std::numeric_limits<double>::infinity(); }
  std::size_t size() const { return x.size(); }
  /// Periodic cubic (Hermite) evaluation from the samples; clamps for a kink.
  double value_at(double xq) const;
  /// u = c + m / rho at the samples.
  std::vector<double> velocity() const;
};

// ---------------------------------------------------------------------------
// Constrained minimisation

struct MinimizerOptions {
  int n = 0;                  // 0: max(256, ceil(20 omega / sqrt(eps)))
  double tol = 1e-10;         // projected-gradient max norm
  long max_iter = 400000;
  double plateau_warning = 1e-2;  // warn when eps / omega^2 exceeds this
  bool record_energy = false;
};

struct MinimizerResult {
  WaveProfile profile;
  long iterations = 0;
  double residual = 0.0;        // final projected-gradient max norm
  double energy = 0.0;          // discrete E_eps over one period
  double scaled_energy = 0.0;   // energy / sqrt(eps)
  std::vector<double> energy_history;
  std::vector<std::string> warnings;
};

/// Discrete relaxed energy of periodic nodal data: the exact energy of the
/// piecewise-linear interpolant, with the potential integrated by 5-point
/// Gauss-Legendre on every segment.
double discrete_energy(const DoubleWell& well, double eps, double dx,
                       const std::vector<double>& rho);

/// Gradient of discrete_energy divided by dx (an L2 gradient per node).
std::vector<double> discrete_gradient(const DoubleWell& well, double eps, double dx,
                                      const std::vector<double>& rho);

/// Projected gradient descent with backtracking on E_eps subject to
/// mean(rho) = a and rho in [rho_g, rho_l]. Throws ConvergenceError.
MinimizerResult minimize_periodic(const EnergyModel& energy, double eps, double omega, double a,
                                  const MinimizerOptions& options = {});

/// Scaled energy minus the total variation of G(rho), G' = sqrt(2 W), over
/// the periodic samples; the Modica-Mortola inequality says this is >= 0.
double modica_mortola_slack(const DoubleWell& well, double eps, const WaveProfile& profile);

// ---------------------------------------------------------------------------
// Phase-plane orbits:  eps p^2 / 2 - W(q) - lambda q = H0

struct OrbitParams {
  double H0 = 0.0;
  double lambda = 0.0;
  double q_minus = 0.0;
  double q_plus = 0.0;
  // Offsets of the turning points from the wells, q_minus = rho_g + d_minus
  // and q_plus = rho_l - d_plus, carried separately for orbits near the
  // separatrix where they underflow the densities.
  double d_minus = 0.0;
  double d_plus = 0.0;
  // Local minima of W + lambda q sit at rho_g + z_min and rho_l - y_min; the
  // turning points are w_minus, w_plus further inward.
  double z_min = 0.0;
  double y_min = 0.0;
  double w_minus = 0.0;
  double w_plus = 0.0;
  // Depth of V = H0 + W + lambda q at each local minimum (both > 0).
  double depth_minus = 0.0;
  double depth_plus = 0.0;
};

/// Orbit whose potential V has depths depth_minus, depth_plus at the two local
/// minima. Every positive pair below the central barrier is a closed orbit.
OrbitParams orbit_from_depths(const DoubleWell& well, double depth_minus, double depth_plus);
/// Orbit through the turning points rho_g + d_minus and rho_l - d_plus.
OrbitParams orbit_from_offsets(const DoubleWell& well, double d_minus, double d_plus);
/// Orbit on the level H0 for the given lambda; throws DomainError when the
/// level has no closed orbit.
OrbitParams orbit_from_level(const DoubleWell& well, double H0, double lambda);

struct OrbitPeriod {
  double T;
  double average;
};

OrbitPeriod orbit_period_and_average(const DoubleWell& well, double eps, const OrbitParams& orbit);
OrbitPeriod orbit_period_and_average(const EnergyModel& energy, double eps,
                                     const OrbitParams& orbit);

/// A closed orbit with its profile q(x), x = 0 at the minimum.
class PeriodicOrbit {
 public:
  PeriodicOrbit(DoubleWell well, double eps, OrbitParams params);

  const OrbitParams& params() const { return params_; }
  const DoubleWell& well() const { return well_; }
  double eps() const { return eps_; }
  double period() const { return period_; }
  double average() const { return average_; }

  /// Profile value and slope at any x (periodic).
  HermiteSample at(double x) const;
  double hamiltonian(double q, double p) const;
  /// eps p^2 / 2 - W(q) - lambda q = H0 rearranged: 2 V(q) / eps = p^2.
  double potential_gap(double q) const;

  WaveProfile sample(int n) const;

 private:
  struct Branch {
    double base;  // well density
    double dir;   // +1 from rho_g inward, -1 from rho_l
    double off;   // local minimum offset from the well
    double w;     // turning point offset from the local minimum
    double t_end;
    double panel;
    std::vector<double> cumulative;  // x at panel boundaries, sqrt(eps/2) included
  };
  // V / (v^2 - w^2), v = w cosh t measured from the local minimum.
  double reduced_gap(const Branch& b, double v) const;
  double integrand(const Branch& b, double t) const;
  double invert(const Branch& b, double target) const;

  DoubleWell well_;
  double eps_;
  OrbitParams params_;
  double split_;
  Branch left_{};
  Branch right_{};
  double x_split_ = 0.0;
  double period_ = 0.0;
  double average_ = 0.0;
};

struct OrbitSolveOptions {
  double tol = 1e-12;
  int max_iter = 200;
  // log depths (see OrbitParams) to start from
  std::optional<std::pair<double, double>> seed_log_depths;
  int n = 0;  // samples; 0 as for the minimiser
};

/// Damped Newton on the log well depths so that T = omega and the
/// orbit average equals a; selects the fundamental orbit.
PeriodicOrbit find_periodic_orbit(const EnergyModel& energy, double eps, double omega, double a,
                                  const OrbitSolveOptions& options = {});
WaveProfile solve_periodic_orbit(const EnergyModel& energy, double eps, double omega, double a,
                                 const OrbitSolveOptions& options = {});

struct LambdaPoint {
  double omega;
  double lambda;
};

std::vector<LambdaPoint> lambda_decay(const EnergyModel& energy, double eps, double a,
                                      const std::vector<double>& omegas);

// ---------------------------------------------------------------------------
// Heteroclinic kink

/// Kink value at x, rho(0) = (rho_g + rho_l) / 2, by inverting the quadrature
/// x(rho) = integral of sqrt(eps / (2 W)).
class Kink {
 public:
  Kink(DoubleWell well, double eps);
  double value(double x) const;
  double slope(double x) const;
  /// x(rho) for rho strictly between the wells.
  double position(double rho) const;

 private:
  double left_log_integrand(double tau) const;
  double right_log_integrand(double tau) const;
  DoubleWell well_;
  double eps_;
  double mid_;
};

WaveProfile kink_profile(const EnergyModel& energy, double eps, double window = 0.0, int n = 0);

struct KinkDistance {
  double omega;
  double distance;
};

/// Periodic orbits of mean `a` translated so their mid-level upcrossing sits
/// at 0, compared with the kink on [-omega/4, omega/4].
std::vector<KinkDistance> kink_limit_check(const EnergyModel& energy, double eps,
                                           const std::vector<double>& omegas, double a = 1.5);

// ---------------------------------------------------------------------------
// Galilean assembly

struct TravelingWave {
  WaveProfile profile;
  double c;
  double m;
  double u1;  // vapour-side velocity
  double u2;  // liquid-side velocity
  bool phase_transition;

  double rho(double x, double t) const;
  double u(double x, double t) const;
};

/// c = u1 - m / rho_vapour, u = c + m / rho. Throws DomainError when m
/// disagrees with profile.m.
TravelingWave galilean_assemble(const WaveProfile& profile, double m, double u1);

/// min over shifts s of max_i |profile.rho_i - f(profile.x_i + s)|.
double translation_distance(const WaveProfile& profile, const std::function<double(double)>& f,
                            double period);

/// First upcrossing of `level` in the samples (linear interpolation).
std::optional<double> profile_upcrossing(const WaveProfile& profile, double level);

}  // namespace nsk
