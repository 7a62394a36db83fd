#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace nsk::quad {

/// Five-point Gauss-Legendre rule mapped to [0, 1]; weights sum to 1.
struct GaussLegendre5 {
  static constexpr std::array<double, 5> nodes = {
      0.046910077030668004, 0.23076534494715845, 0.5, 0.76923465505284155,
      0.953089922969332};
  static constexpr std::array<double, 5> weights = {
      0.11846344252809454, 0.23931433524968324, 0.28444444444444444,
      0.23931433524968324, 0.11846344252809454};
};

/// Fixed five-point rule on [a, b].
template <class F>
double gauss5(F&& f, double a, double b) {
  const double len = b - a;
  double acc = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    acc += GaussLegendre5::weights[i] * f(a + len * GaussLegendre5::nodes[i]);
  }
  return acc * len;
}

namespace detail {
template <class F>
double adaptive_gauss_rec(F& f, double a, double b, double whole, double tol,
                          int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss5(f, a, mid);
  const double right = gauss5(f, mid, b);
  const double both = left + right;
  // relative floor: halved absolute tolerances eventually drop below roundoff
  const double diff = std::abs(both - whole);
  if (depth <= 0 || diff <= tol || diff <= 4e-16 * std::abs(both)) {
    return both;
  }
  return adaptive_gauss_rec(f, a, mid, left, 0.5 * tol, depth - 1) +
         adaptive_gauss_rec(f, mid, b, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Composite Gauss-Legendre with interval halving until successive
/// refinements agree to `tol` (absolute).
template <class F>
double adaptive_gauss(F&& f, double a, double b, double tol = 1e-10,
                      int max_depth = 40) {
  if (a == b) {
    return 0.0;
  }
  // Start from a few panels so that an accidental agreement on the coarsest
  // level cannot terminate the recursion early.
  constexpr int kPanels = 8;
  const double step = (b - a) / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * step;
    const double hi = (i + 1 == kPanels) ? b : lo + step;
    total += detail::adaptive_gauss_rec(f, lo, hi, gauss5(f, lo, hi),
                                        tol / kPanels, max_depth);
  }
  return total;
}

}  // namespace nsk::quad
