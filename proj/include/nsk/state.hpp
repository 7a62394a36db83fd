#pragma once

#include "nsk/hermite.hpp"

namespace nsk {

/// Density and velocity, each carried as Hermite data, at time t.
struct FluidState {
  HermiteField rho;
  HermiteField u;
  double t = 0.0;

  const PeriodicGrid& grid() const noexcept { return rho.grid(); }
};

}  // namespace nsk
