#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace nsk {

/// Uniform periodic grid on the unit torus: nodes x_j = j / nx, j = 0..nx-1.
class PeriodicGrid {
 public:
  explicit PeriodicGrid(int nx);

  int nx() const noexcept { return nx_; }
  double h() const noexcept { return 1.0 / nx_; }
  double node(int j) const noexcept { return static_cast<double>(j) / nx_; }
  int wrap(int j) const noexcept {
    const int r = j % nx_;
    return r < 0 ? r + nx_ : r;
  }

  bool operator==(const PeriodicGrid&) const = default;

 private:
  int nx_;
};

struct HermiteSample {
  double value;
  double deriv;
};

/// Nodal values and first derivatives of a periodic C^1 piecewise cubic.
class HermiteField {
 public:
  explicit HermiteField(PeriodicGrid grid);
  HermiteField(PeriodicGrid grid, std::vector<double> values, std::vector<double> derivs);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.nx(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> derivs() const noexcept { return derivs_; }
  std::span<double> values() noexcept { return values_; }
  std::span<double> derivs() noexcept { return derivs_; }

  /// Periodic node access.
  double value(int j) const noexcept { return values_[grid_.wrap(j)]; }
  double deriv(int j) const noexcept { return derivs_[grid_.wrap(j)]; }

  /// Cubic Hermite interpolant and its exact derivative at any x (wrapped).
  HermiteSample interp(double x) const;
  /// Second derivative of the cubic on the cell containing x.
  double interp_second(double x) const;

  /// Exact integral over one period; the derivative terms telescope, so this
  /// is h * sum(values).
  double integral() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
  std::vector<double> derivs_;
};

/// Nodal projection I_h^3 f: values f(x_j), derivatives df(x_j).
HermiteField sample(const std::function<double(double)>& f,
                    const std::function<double(double)>& df, const PeriodicGrid& grid);

/// Five-node window (offsets -2..2) of values and derivatives.
struct StencilWindow {
  std::array<double, 5> v{};
  std::array<double, 5> vx{};
  double h = 0.0;
};

StencilWindow window_at(const HermiteField& field, int j);

enum class StencilKind { D2, D3, D4, D4Printed };

double apply_stencil(StencilKind kind, const StencilWindow& w);

// Stencil values at node j; D4 uses the repaired coefficients.
double d2(const HermiteField& field, int j);
double d3(const HermiteField& field, int j);
double d4(const HermiteField& field, int j);

struct ExactnessReport {
  StencilKind kind;
  int certified_degree;             // -1 when even constants fail
  std::vector<double> rel_errors;   // per monomial degree 0..max_degree
};

/// Apply the stencil to exact Hermite data of x^p (p = 0..max_degree) on a
/// non-wrapping window and report the highest degree reproduced to 1e-10.
ExactnessReport exactness_gate(StencilKind kind, int max_degree);

/// Throws std::logic_error unless D2, D3 and the repaired D4 are exact
/// through degree 4.
void certify_stencils();

void write_csv(std::ostream& out, const HermiteField& field);
HermiteField read_field_csv(std::istream& in);

}  // namespace nsk
