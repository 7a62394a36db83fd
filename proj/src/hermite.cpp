#include "nsk/hermite.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "nsk/errors.hpp"

namespace nsk {

PeriodicGrid::PeriodicGrid(int nx) : nx_(nx) {
  if (nx < 1) {
    throw DomainError("PeriodicGrid: nx must be positive");
  }
}

HermiteField::HermiteField(PeriodicGrid grid)
    : grid_(grid), values_(grid.nx(), 0.0), derivs_(grid.nx(), 0.0) {}

HermiteField::HermiteField(PeriodicGrid grid, std::vector<double> values,
                           std::vector<double> derivs)
    : grid_(grid), values_(std::move(values)), derivs_(std::move(derivs)) {
  if (values_.size() != static_cast<std::size_t>(grid_.nx()) ||
      derivs_.size() != static_cast<std::size_t>(grid_.nx())) {
    throw std::invalid_argument("HermiteField: array length must equal nx");
  }
}

namespace {

struct CellPos {
  int j;
  double xi;
};

CellPos locate(const PeriodicGrid& grid, double x) {
  double xs = x - std::floor(x);
  double t = xs * grid.nx();
  int j = static_cast<int>(t);
  if (j >= grid.nx()) {
    j = grid.nx() - 1;
  }
  double xi = t - j;
  if (xi > 1.0) {
    xi = 1.0;
  }
  return {j, xi};
}

}  // namespace

HermiteSample HermiteField::interp(double x) const {
  const CellPos c = locate(grid_, x);
  const int j1 = c.j + 1 == grid_.nx() ? 0 : c.j + 1;
  const double h = grid_.h();
  const double t = c.xi;
  const double s = 1.0 - t;
  const double v0 = values_[c.j], v1 = values_[j1];
  const double d0 = derivs_[c.j], d1 = derivs_[j1];

  const double value = (1.0 + 2.0 * t) * s * s * v0 + t * t * (3.0 - 2.0 * t) * v1 +
                       h * (t * s * s * d0 - t * t * s * d1);
  const double deriv = 6.0 * t * s * (v1 - v0) / h + (3.0 * t * t - 4.0 * t + 1.0) * d0 +
                       (3.0 * t * t - 2.0 * t) * d1;
  return {value, deriv};
}

double HermiteField::interp_second(double x) const {
  const CellPos c = locate(grid_, x);
  const int j1 = c.j + 1 == grid_.nx() ? 0 : c.j + 1;
  const double h = grid_.h();
  const double t = c.xi;
  return (6.0 - 12.0 * t) * (values_[j1] - values_[c.j]) / (h * h) +
         ((6.0 * t - 4.0) * derivs_[c.j] + (6.0 * t - 2.0) * derivs_[j1]) / h;
}

double HermiteField::integral() const {
  double sum = 0.0;
  for (double v : values_) {
    sum += v;
  }
  return sum * grid_.h();
}

HermiteField sample(const std::function<double(double)>& f,
                    const std::function<double(double)>& df, const PeriodicGrid& grid) {
  std::vector<double> values(grid.nx());
  std::vector<double> derivs(grid.nx());
  for (int j = 0; j < grid.nx(); ++j) {
    values[j] = f(grid.node(j));
    derivs[j] = df(grid.node(j));
  }
  return HermiteField(grid, std::move(values), std::move(derivs));
}

// ---------------------------------------------------------------------------
// Finite-difference stencils on Hermite data

StencilWindow window_at(const HermiteField& field, int j) {
  StencilWindow w;
  for (int o = -2; o <= 2; ++o) {
    w.v[o + 2] = field.value(j + o);
    w.vx[o + 2] = field.deriv(j + o);
  }
  w.h = field.grid().h();
  return w;
}

namespace {

// Index helpers: p1 = v_{j+1}, m1 = v_{j-1}, ...
struct Win {
  const StencilWindow& w;
  double v(int o) const { return w.v[o + 2]; }
  double vx(int o) const { return w.vx[o + 2]; }
};

double stencil_d2(const Win& s, double h) {
  return (128.0 / 27.0 * (0.5 * (s.v(1) + s.v(-1)) - s.v(0)) +
          7.0 / 27.0 * (0.5 * (s.v(2) + s.v(-2)) - s.v(0)) -
          8.0 * h / 9.0 * (s.vx(1) - s.vx(-1)) - h / 36.0 * (s.vx(2) - s.vx(-2))) /
         (h * h);
}

double stencil_d3(const Win& s, double h) {
  return (176.0 / 9.0 * (0.5 * (s.v(1) - s.v(-1)) - h * s.vx(0)) +
          31.0 / 72.0 * (0.5 * (s.v(2) - s.v(-2)) - 2.0 * h * s.vx(0)) -
          16.0 * h / 3.0 * (0.5 * (s.vx(1) + s.vx(-1)) - s.vx(0)) -
          h / 12.0 * (0.5 * (s.vx(2) + s.vx(-2)) - s.vx(0))) /
         (h * h * h);
}

// Repaired fourth-derivative stencil: "- v_j" in the symmetric differences
// and -41/6 on the outer pair, the unique choice exact through degree 4.
double stencil_d4(const Win& s, double h) {
  return (-128.0 / 3.0 * (0.5 * (s.v(1) + s.v(-1)) - s.v(0)) -
          41.0 / 6.0 * (0.5 * (s.v(2) + s.v(-2)) - s.v(0)) +
          16.0 * h * (s.vx(1) - s.vx(-1)) + 0.75 * h * (s.vx(2) - s.vx(-2))) /
         (h * h * h * h);
}

// The coefficients exactly as typeset, kept to demonstrate that they fail
// the exactness gate.
double stencil_d4_printed(const Win& s, double h) {
  return (-128.0 / 3.0 * (0.5 * (s.v(1) + s.v(-1)) - h * s.v(0)) -
          41.0 / 3.0 * (0.5 * (s.v(2) + s.v(-2)) - 2.0 * h * s.v(0)) +
          16.0 * h * (s.vx(1) - s.vx(-1)) + 0.75 * h * (s.vx(2) - s.vx(-2))) /
         (h * h * h * h);
}

}  // namespace

double apply_stencil(StencilKind kind, const StencilWindow& w) {
  const Win s{w};
  switch (kind) {
    case StencilKind::D2:
      return stencil_d2(s, w.h);
    case StencilKind::D3:
      return stencil_d3(s, w.h);
    case StencilKind::D4:
      return stencil_d4(s, w.h);
    case StencilKind::D4Printed:
      return stencil_d4_printed(s, w.h);
  }
  return 0.0;
}

double d2(const HermiteField& field, int j) {
  return apply_stencil(StencilKind::D2, window_at(field, j));
}

double d3(const HermiteField& field, int j) {
  return apply_stencil(StencilKind::D3, window_at(field, j));
}

double d4(const HermiteField& field, int j) {
  return apply_stencil(StencilKind::D4, window_at(field, j));
}

namespace {

int derivative_order(StencilKind kind) {
  switch (kind) {
    case StencilKind::D2:
      return 2;
    case StencilKind::D3:
      return 3;
    case StencilKind::D4:
    case StencilKind::D4Printed:
      return 4;
  }
  return 0;
}

// q-th derivative of x^p.
double monomial_derivative(int p, int q, double x) {
  if (q > p) {
    return 0.0;
  }
  double coef = 1.0;
  for (int i = 0; i < q; ++i) {
    coef *= (p - i);
  }
  return coef * std::pow(x, p - q);
}

}  // namespace

ExactnessReport exactness_gate(StencilKind kind, int max_degree) {
  // A coarse window keeps the 1/h^4 rounding amplification near 1e-12.
  constexpr double kCentre = 0.3;
  constexpr double kH = 0.25;
  constexpr double kTol = 1e-10;
  const int order = derivative_order(kind);

  ExactnessReport report{kind, -1, {}};
  bool contiguous = true;
  for (int p = 0; p <= max_degree; ++p) {
    StencilWindow w;
    w.h = kH;
    for (int o = -2; o <= 2; ++o) {
      const double x = kCentre + o * kH;
      w.v[o + 2] = monomial_derivative(p, 0, x);
      w.vx[o + 2] = monomial_derivative(p, 1, x);
    }
    const double exact = monomial_derivative(p, order, kCentre);
    const double approx = apply_stencil(kind, w);
    const double err = std::abs(approx - exact) / std::max(1.0, std::abs(exact));
    report.rel_errors.push_back(err);
    if (contiguous && err <= kTol) {
      report.certified_degree = p;
    } else {
      contiguous = false;
    }
  }
  return report;
}

void certify_stencils() {
  for (StencilKind kind : {StencilKind::D2, StencilKind::D3, StencilKind::D4}) {
    const ExactnessReport r = exactness_gate(kind, 4);
    if (r.certified_degree < 4) {
      std::ostringstream msg;
      msg << "stencil D" << derivative_order(kind) << " certified only to degree "
          << r.certified_degree;
      throw std::logic_error(msg.str());
    }
  }
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(std::ostream& out, const HermiteField& field) {
  out << "x,v,v_x\n";
  out << std::setprecision(17);
  for (int j = 0; j < field.size(); ++j) {
    out << field.grid().node(j) << ',' << field.values()[j] << ',' << field.derivs()[j]
        << '\n';
  }
}

HermiteField read_field_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("field CSV: empty input");
  }
  std::vector<double> values;
  std::vector<double> derivs;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    double x = 0, v = 0, vx = 0;
    char c1 = 0, c2 = 0;
    if (!(row >> x >> c1 >> v >> c2 >> vx) || c1 != ',' || c2 != ',') {
      throw ConfigError("field CSV: malformed row '" + line + "'");
    }
    values.push_back(v);
    derivs.push_back(vx);
  }
  if (values.empty()) {
    throw ConfigError("field CSV: no rows");
  }
  const int nx = static_cast<int>(values.size());
  return HermiteField(PeriodicGrid(nx), std::move(values), std::move(derivs));
}

}  // namespace nsk
