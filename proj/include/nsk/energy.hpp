#pragma once

#include <functional>

namespace nsk {

/// Volume-specific available energy Psi(rho) together with its analytic
/// derivatives, plus the constant moving-frame momentum m.
///
/// The quartic double well Psi = (rho-1)^2 (rho-2)^2 / 4 is the default; any
/// other energy can be plugged in as long as the derivative chain is exact.
struct EnergyModel {
  using Fn = std::function<double(double)>;

  Fn psi;
  Fn dpsi;
  Fn d2psi;
  Fn d3psi;  // used only by the u_x source update
  double m = 0.0;

  // Starting guess for the common-tangent solve (the m = 0 wells).
  double seed_vapor = 1.0;
  double seed_liquid = 2.0;

  static EnergyModel quartic(double m = 0.0);

  EnergyModel with_momentum(double new_m) const {
    EnergyModel copy = *this;
    copy.m = new_m;
    return copy;
  }

  /// Multiply Psi and all derivatives by `factor` (keeps the wells).
  EnergyModel scaled(double factor) const;
};

// Modified energy Psi^m(rho) = Psi(rho) - m^2 / (2 rho) and derivatives.
double psi_m(const EnergyModel& model, double rho);
double d_psi_m(const EnergyModel& model, double rho);
double d2_psi_m(const EnergyModel& model, double rho);

// p = rho Psi'(rho) - Psi(rho);  dp/drho = rho Psi''(rho).
double pressure(const EnergyModel& model, double rho);
double d_pressure(const EnergyModel& model, double rho);

/// Common tangent line of Psi^m touching at the vapor and liquid densities.
struct Bitangent {
  double rho_g = 0.0;
  double rho_l = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  int iterations = 0;
  double residual = 0.0;

  double line(double rho) const { return slope * rho + intercept; }
  double mid() const { return 0.5 * (rho_g + rho_l); }
  double width() const { return rho_l - rho_g; }
};

/// Damped Newton solve for the common tangent. Throws NoBitangentError when
/// Psi^m has lost its double-well shape for this m.
Bitangent bitangent(const EnergyModel& model);

/// Affine map to the normalised phase variable: w(rho_g) = -1, w(rho_l) = +1.
double to_phase_variable(const Bitangent& bit, double rho);
double from_phase_variable(const Bitangent& bit, double w);

/// W(rho) = Psi^m(rho) - l_m(rho) on the window [rho_g - d, rho_l + d] with
/// d = 0.1 (rho_l - rho_g), continued outside by the second-order Taylor
/// polynomial at the window edge. The continuation is C^2 and grows
/// quadratically as long as W'' > 0 at the edge; otherwise a unit curvature
/// floor is used.
class DoubleWell {
 public:
  DoubleWell(EnergyModel model, Bitangent bit);

  double operator()(double rho) const { return value(rho); }
  double value(double rho) const;
  double deriv(double rho) const;
  double second(double rho) const;

  const EnergyModel& model() const { return model_; }
  const Bitangent& bitangent() const { return bit_; }
  double window_lo() const { return lo_; }
  double window_hi() const { return hi_; }

 private:
  struct Edge {
    double at, value, slope, curvature;
  };
  double inner(double rho) const;
  double inner_deriv(double rho) const;
  double inner_second(double rho) const;

  EnergyModel model_;
  Bitangent bit_;
  double lo_;
  double hi_;
  Edge left_{};
  Edge right_{};
};

double double_well(const EnergyModel& model, const Bitangent& bit, double rho);

/// Surface constant sigma = integral of sqrt(2 W(rho)) over [rho_g, rho_l].
double sigma(const EnergyModel& model, const Bitangent& bit);
double sigma(const DoubleWell& well);

}  // namespace nsk
