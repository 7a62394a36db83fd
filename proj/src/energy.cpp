#include "nsk/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nsk/errors.hpp"
#include "nsk/quadrature.hpp"

namespace nsk {

namespace {

void require_positive(double rho, const char* who) {
  if (!(rho > 0.0)) {
    std::ostringstream msg;
    msg << who << ": density must be positive, got " << rho;
    throw DomainError(msg.str());
  }
}

}  // namespace

EnergyModel EnergyModel::quartic(double m) {
  EnergyModel model;
  // Psi = s^2 / 4 with s = (rho - 1)(rho - 2).
  model.psi = [](double r) {
    const double s = (r - 1.0) * (r - 2.0);
    return 0.25 * s * s;
  };
  model.dpsi = [](double r) {
    return 0.5 * (r - 1.0) * (r - 2.0) * (2.0 * r - 3.0);
  };
  model.d2psi = [](double r) { return 3.0 * r * r - 9.0 * r + 6.5; };
  model.d3psi = [](double r) { return 6.0 * r - 9.0; };
  model.m = m;
  return model;
}

EnergyModel EnergyModel::scaled(double factor) const {
  EnergyModel out = *this;
  auto wrap = [factor](Fn f) -> Fn {
    return [factor, f = std::move(f)](double r) { return factor * f(r); };
  };
  out.psi = wrap(psi);
  out.dpsi = wrap(dpsi);
  out.d2psi = wrap(d2psi);
  out.d3psi = wrap(d3psi);
  return out;
}

double psi_m(const EnergyModel& model, double rho) {
  require_positive(rho, "psi_m");
  return model.psi(rho) - model.m * model.m / (2.0 * rho);
}

double d_psi_m(const EnergyModel& model, double rho) {
  require_positive(rho, "d_psi_m");
  return model.dpsi(rho) + model.m * model.m / (2.0 * rho * rho);
}

double d2_psi_m(const EnergyModel& model, double rho) {
  require_positive(rho, "d2_psi_m");
  return model.d2psi(rho) - model.m * model.m / (rho * rho * rho);
}

double pressure(const EnergyModel& model, double rho) {
  require_positive(rho, "pressure");
  return rho * model.dpsi(rho) - model.psi(rho);
}

double d_pressure(const EnergyModel& model, double rho) {
  require_positive(rho, "d_pressure");
  return rho * model.d2psi(rho);
}

// ---------------------------------------------------------------------------
// Common tangent

namespace {

struct TangentResidual {
  double slope_gap;  // Psi^m'(g) - Psi^m'(l)
  double chord_gap;  // Psi^m'(g) (l - g) - (Psi^m(l) - Psi^m(g))
  double norm() const { return std::max(std::abs(slope_gap), std::abs(chord_gap)); }
};

TangentResidual tangent_residual(const EnergyModel& model, double g, double l) {
  const double sg = d_psi_m(model, g);
  return {sg - d_psi_m(model, l), sg * (l - g) - (psi_m(model, l) - psi_m(model, g))};
}

[[noreturn]] void no_bitangent(const EnergyModel& model, const std::string& why) {
  std::ostringstream msg;
  msg << "no bitangent for m = " << model.m << ": " << why;
  throw NoBitangentError(msg.str());
}

}  // namespace

Bitangent bitangent(const EnergyModel& model) {
  constexpr int kMaxIter = 100;
  constexpr double kTol = 1e-12;

  double g = model.seed_vapor;
  double l = model.seed_liquid;
  TangentResidual res{};
  int iter = 0;
  try {
    res = tangent_residual(model, g, l);
    for (; iter < kMaxIter && res.norm() > 0.25 * kTol; ++iter) {
      const double a11 = d2_psi_m(model, g);
      const double a12 = -d2_psi_m(model, l);
      const double a21 = d2_psi_m(model, g) * (l - g);
      const double a22 = d_psi_m(model, g) - d_psi_m(model, l);
      const double det = a11 * a22 - a12 * a21;
      if (!std::isfinite(det) || det == 0.0) {
        no_bitangent(model, "singular Newton system");
      }
      const double dg = (res.slope_gap * a22 - a12 * res.chord_gap) / det;
      const double dl = (a11 * res.chord_gap - a21 * res.slope_gap) / det;

      // Halve the step until the residual drops (or the step is negligible).
      double step = 1.0;
      bool accepted = false;
      for (int halvings = 0; halvings < 40; ++halvings, step *= 0.5) {
        const double ng = g - step * dg;
        const double nl = l - step * dl;
        if (!(ng > 0.0) || !(nl > ng)) {
          continue;
        }
        const TangentResidual trial = tangent_residual(model, ng, nl);
        if (trial.norm() < res.norm()) {
          g = ng;
          l = nl;
          res = trial;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        break;
      }
    }
  } catch (const DomainError&) {
    no_bitangent(model, "Newton iterate left the positive densities");
  }

  if (!(res.norm() <= kTol)) {
    std::ostringstream why;
    why << "Newton stalled with residual " << res.norm();
    no_bitangent(model, why.str());
  }
  if (!(g < l) || std::abs(l - g) < 1e-8) {
    no_bitangent(model, "touching points collapsed");
  }

  Bitangent bit;
  bit.rho_g = g;
  bit.rho_l = l;
  bit.slope = d_psi_m(model, g);
  bit.intercept = psi_m(model, g) - bit.slope * g;
  bit.iterations = iter;
  bit.residual = res.norm();

  // Psi^m must lie above the line strictly inside (g, l).
  constexpr int kScan = 2000;
  const double scale = std::max(1.0, std::abs(psi_m(model, bit.mid())));
  double barrier = 0.0;
  for (int i = 1; i < kScan; ++i) {
    const double r = g + (l - g) * i / kScan;
    const double gap = psi_m(model, r) - bit.line(r);
    if (gap < -1e-12 * scale) {
      no_bitangent(model, "Psi^m crosses below the common tangent");
    }
    barrier = std::max(barrier, gap);
  }
  // a degenerate tangent (two nearby points on one convex arc) has no barrier
  if (barrier < 1e-10 * scale) no_bitangent(model, "no barrier between the touching points");
  return bit;
}

double to_phase_variable(const Bitangent& bit, double rho) {
  return 2.0 * (rho - bit.rho_g) / (bit.rho_l - bit.rho_g) - 1.0;
}

double from_phase_variable(const Bitangent& bit, double w) {
  return bit.rho_g + 0.5 * (w + 1.0) * (bit.rho_l - bit.rho_g);
}

// ---------------------------------------------------------------------------
// Double well

DoubleWell::DoubleWell(EnergyModel model, Bitangent bit)
    : model_(std::move(model)), bit_(bit) {
  const double pad = 0.1 * bit_.width();
  lo_ = bit_.rho_g - pad;
  hi_ = bit_.rho_l + pad;
  if (!(lo_ > 0.0)) {
    // Keep the physical window inside rho > 0 where Psi^m is defined.
    lo_ = 0.5 * bit_.rho_g;
  }
  auto edge = [this](double at) {
    const double curv = inner_second(at);
    return Edge{at, inner(at), inner_deriv(at), curv > 0.0 ? curv : 1.0};
  };
  left_ = edge(lo_);
  right_ = edge(hi_);
}

double DoubleWell::inner(double rho) const {
  return psi_m(model_, rho) - bit_.line(rho);
}

double DoubleWell::inner_deriv(double rho) const {
  return d_psi_m(model_, rho) - bit_.slope;
}

double DoubleWell::inner_second(double rho) const { return d2_psi_m(model_, rho); }

double DoubleWell::value(double rho) const {
  if (rho < lo_) {
    const double d = rho - lo_;
    return left_.value + d * (left_.slope + 0.5 * left_.curvature * d);
  }
  if (rho > hi_) {
    const double d = rho - hi_;
    return right_.value + d * (right_.slope + 0.5 * right_.curvature * d);
  }
  return inner(rho);
}

double DoubleWell::deriv(double rho) const {
  if (rho < lo_) {
    return left_.slope + left_.curvature * (rho - lo_);
  }
  if (rho > hi_) {
    return right_.slope + right_.curvature * (rho - hi_);
  }
  return inner_deriv(rho);
}

double DoubleWell::second(double rho) const {
  if (rho < lo_) {
    return left_.curvature;
  }
  if (rho > hi_) {
    return right_.curvature;
  }
  return inner_second(rho);
}

double double_well(const EnergyModel& model, const Bitangent& bit, double rho) {
  return DoubleWell(model, bit).value(rho);
}

double sigma(const DoubleWell& well) {
  const Bitangent& bit = well.bitangent();
  auto integrand = [&well](double r) { return std::sqrt(2.0 * std::max(0.0, well(r))); };
  return quad::adaptive_gauss(integrand, bit.rho_g, bit.rho_l, 1e-12);
}

double sigma(const EnergyModel& model, const Bitangent& bit) {
  return sigma(DoubleWell(model, bit));
}

}  // namespace nsk
