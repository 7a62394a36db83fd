#include "nsk/twave.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nsk/errors.hpp"
#include "nsk/quadrature.hpp"

namespace nsk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using GL = quad::GaussLegendre5;

int default_points(double eps, double omega) {
  return std::max(256, static_cast<int>(std::ceil(20.0 * omega / std::sqrt(eps))));
}

DoubleWell make_well(const EnergyModel& energy) {
  return DoubleWell(energy, bitangent(energy));
}

// Cumulative integral of a smooth integrand on equal panels, with inversion.
struct Cumulative {
  double t0 = 0.0;
  double panel = 0.0;
  std::vector<double> cum;  // cum[k] = integral over [t0, t0 + k panel]

  template <class F>
  static Cumulative build(const F& g, double t0, double t1, double target_width, double scale) {
    Cumulative c;
    c.t0 = t0;
    const int panels = std::max(8, static_cast<int>(std::ceil((t1 - t0) / target_width)));
    c.panel = (t1 - t0) / panels;
    c.cum.assign(panels + 1, 0.0);
    for (int k = 0; k < panels; ++k) {
      const double a = t0 + k * c.panel;
      c.cum[k + 1] = c.cum[k] + scale * quad::gauss5(g, a, a + c.panel);
    }
    return c;
  }

  double total() const { return cum.back(); }
  double t1() const { return t0 + panel * (static_cast<double>(cum.size()) - 1.0); }

  // t with integral(t0, t) = target; g > 0 is the integrand (times scale).
  template <class F>
  double invert(const F& g, double scale, double target) const {
    if (target <= 0.0) return t0;
    if (target >= total()) return t1();
    const auto it = std::upper_bound(cum.begin(), cum.end(), target);
    const auto k = static_cast<std::size_t>(std::distance(cum.begin(), it)) - 1;
    double lo = t0 + static_cast<double>(k) * panel;
    double hi = lo + panel;
    const double base = cum[k];
    const double a = lo;
    double t = lo + panel * (target - base) / (cum[k + 1] - base);
    for (int it2 = 0; it2 < 60; ++it2) {
      const double f = base + scale * quad::gauss5(g, a, t) - target;
      if (f > 0.0) hi = t; else lo = t;
      double next = t - f / (scale * g(t));
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) {
        return next;
      }
      t = next;
    }
    return t;
  }
};

// Divided difference (f(b) - f(a)) / (b - a) with a guard for b ~ a.
template <class F>
double divided(const F& f, double a, double b, double fa) {
  const double gap = b - a;
  if (std::abs(gap) > 1e-9 * std::max(std::abs(a), 1e-300)) {
    return (f(b) - fa) / gap;
  }
  const double step = 1e-6 * std::max(std::abs(a), 1e-300);
  return (f(a + step) - f(a - step)) / (2.0 * step);
}

}  // namespace

// ---------------------------------------------------------------------------
// WaveProfile

double WaveProfile::value_at(double xq) const {
  const std::size_t n = x.size();
  if (n == 0) return kNaN;
  if (n == 1) return rho[0];
  const double dx = x[1] - x[0];
  double s = (xq - x[0]) / dx;
  if (periodic()) {
    const double nn = static_cast<double>(n);
    s -= nn * std::floor(s / nn);
  } else {
    if (s <= 0.0) return rho.front();
    if (s >= static_cast<double>(n - 1)) return rho.back();
  }
  auto j = static_cast<std::size_t>(s);
  if (j >= n) j = n - 1;
  const std::size_t j1 = (j + 1) % n;
  const double t = s - static_cast<double>(j);
  if (rho_x.size() != n) {
    return (1.0 - t) * rho[j] + t * rho[j1];
  }
  const double u = 1.0 - t;
  return (1.0 + 2.0 * t) * u * u * rho[j] + t * t * (3.0 - 2.0 * t) * rho[j1] +
         dx * (t * u * u * rho_x[j] - t * t * u * rho_x[j1]);
}

std::vector<double> WaveProfile::velocity() const {
  std::vector<double> u(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) u[i] = c + m / rho[i];
  return u;
}

// ---------------------------------------------------------------------------
// Discrete energy

double discrete_energy(const DoubleWell& well, double eps, double dx,
                       const std::vector<double>& rho) {
  const std::size_t n = rho.size();
  long double total = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rho[i];
    const double d = rho[(i + 1) % n] - a;
    double pot = 0.0;
    for (std::size_t k = 0; k < 5; ++k) pot += GL::weights[k] * well.value(a + GL::nodes[k] * d);
    total += 0.5L * eps * d * d / dx + static_cast<long double>(dx * pot);
  }
  return static_cast<double>(total);
}

std::vector<double> discrete_gradient(const DoubleWell& well, double eps, double dx,
                                      const std::vector<double>& rho) {
  const std::size_t n = rho.size();
  std::vector<double> g(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n;
    const double a = rho[i];
    const double d = rho[ip] - a;
    double left = 0.0;
    double right = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      const double w = GL::weights[k] * well.deriv(a + GL::nodes[k] * d);
      left += w * (1.0 - GL::nodes[k]);
      right += w * GL::nodes[k];
    }
    // Segment i contributes to nodes i and i + 1.
    g[i] += left - eps * d / (dx * dx);
    g[ip] += right + eps * d / (dx * dx);
  }
  return g;
}

namespace {

// Euclidean projection onto {mean = a} intersected with the box.
std::vector<double> project(const std::vector<double>& y, double a, double lo, double hi) {
  const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
  double s_lo = *mn - hi;
  double s_hi = *mx - lo;
  const double n = static_cast<double>(y.size());
  auto mean_at = [&](double s) {
    double sum = 0.0;
    for (double v : y) sum += std::clamp(v - s, lo, hi);
    return sum / n;
  };
  double s = 0.5 * (s_lo + s_hi);
  for (int it = 0; it < 200; ++it) {
    s = 0.5 * (s_lo + s_hi);
    const double m = mean_at(s);
    if (m > a) s_lo = s; else s_hi = s;
    if (s_hi - s_lo <= 1e-17 * std::max(1.0, std::abs(s))) break;
  }
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = std::clamp(y[i] - s, lo, hi);
  // Remove the last rounding-level mean error from the free entries.
  double err = 0.0;
  std::size_t free_count = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    err += out[i];
    if (out[i] > lo && out[i] < hi) ++free_count;
  }
  err = err / n - a;
  if (free_count > 0) {
    const double shift = err * n / static_cast<double>(free_count);
    for (double& v : out) {
      if (v > lo && v < hi) v = std::clamp(v - shift, lo, hi);
    }
  }
  return out;
}

double projected_gradient_norm(const std::vector<double>& rho, const std::vector<double>& g,
                               double lo, double hi) {
  // Mean of g over the entries free to move along -g.
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((rho[i] <= lo && g[i] > 0.0) || (rho[i] >= hi && g[i] < 0.0)) continue;
    sum += g[i];
    ++count;
  }
  if (count == 0) return 0.0;
  const double mean = sum / static_cast<double>(count);
  double norm = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g[i] - mean;
    if ((rho[i] <= lo && r > 0.0) || (rho[i] >= hi && r < 0.0)) continue;
    norm = std::max(norm, std::abs(r));
  }
  return norm;
}

}  // namespace

MinimizerResult minimize_periodic(const EnergyModel& energy, double eps, double omega, double a,
                                  const MinimizerOptions& options) {
  if (!(eps > 0.0) || !(omega > 0.0)) {
    throw DomainError("minimize_periodic: eps and omega must be positive");
  }
  const DoubleWell well = make_well(energy);
  const Bitangent& bit = well.bitangent();
  const double lo = bit.rho_g;
  const double hi = bit.rho_l;
  if (!(a > lo && a < hi)) {
    std::ostringstream msg;
    msg << "minimize_periodic: average " << a << " outside (" << lo << ", " << hi << ")";
    throw DomainError(msg.str());
  }

  MinimizerResult res;
  if (eps / (omega * omega) > options.plateau_warning) {
    res.warnings.push_back("eps / omega^2 above threshold: plateaus may not form");
  }
  const int n = options.n > 0 ? options.n : default_points(eps, omega);
  const double dx = omega / n;

  // Two smoothed jumps: liquid on [0, theta omega).
  const double theta = (a - lo) / (hi - lo);
  const double width = 2.0 * std::sqrt(2.0 * eps);
  std::vector<double> rho(n);
  for (int i = 0; i < n; ++i) {
    const double x = i * dx;
    double f = 0.0;
    for (int k = -1; k <= 1; ++k) {
      f += 0.5 * (std::tanh((x - k * omega) / width) -
                  std::tanh((x - theta * omega - k * omega) / width));
    }
    rho[i] = lo + (hi - lo) * std::clamp(f, 0.0, 1.0);
  }
  rho = project(rho, a, lo, hi);

  double e = discrete_energy(well, eps, dx, rho);
  std::vector<double> g = discrete_gradient(well, eps, dx, rho);
  const double lipschitz = 4.0 * eps / (dx * dx) + 1.0;
  double step = 1.0 / lipschitz;
  double r = projected_gradient_norm(rho, g, lo, hi);
  if (options.record_energy) res.energy_history.push_back(e);

  long iter = 0;
  bool stalled = false;
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon();
  for (; iter < options.max_iter && r > options.tol; ++iter) {
    std::vector<double> trial;
    std::vector<double> g_new;
    double e_trial = 0.0;
    double r_trial = 0.0;
    bool accepted = false;
    double alpha = step;
    for (int bt = 0; bt < 40; ++bt) {
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = rho[i] - alpha * g[i];
      trial = project(y, a, lo, hi);
      e_trial = discrete_energy(well, eps, dx, trial);
      double moved = 0.0;
      for (int i = 0; i < n; ++i) moved += (trial[i] - rho[i]) * (trial[i] - rho[i]);
      if (e_trial <= e - 1e-4 * dx * moved / alpha) {
        accepted = true;
        break;
      }
      // Below roundoff in E the projected gradient decides.
      if (std::abs(e_trial - e) <= roundoff * std::abs(e)) {
        g_new = discrete_gradient(well, eps, dx, trial);
        r_trial = projected_gradient_norm(trial, g_new, lo, hi);
        if (r_trial < r) {
          accepted = true;
          break;
        }
        g_new.clear();
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      stalled = true;
      break;
    }
    if (g_new.empty()) {
      g_new = discrete_gradient(well, eps, dx, trial);
      r_trial = projected_gradient_norm(trial, g_new, lo, hi);
    }
    // Barzilai-Borwein length for the next trial step.
    double ss = 0.0;
    double sy = 0.0;
    for (int i = 0; i < n; ++i) {
      const double s = trial[i] - rho[i];
      ss += s * s;
      sy += s * (g_new[i] - g[i]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-3 / lipschitz, 1e6 / lipschitz) : 1.0 / lipschitz;
    rho = std::move(trial);
    g = std::move(g_new);
    e = e_trial;
    r = r_trial;
    if (options.record_energy) res.energy_history.push_back(e);
  }
  if (r > options.tol) {
    std::ostringstream msg;
    msg << "minimize_periodic: projected gradient " << r << " after " << iter << " iterations"
        << (stalled ? " (line search stalled)" : "");
    throw ConvergenceError(msg.str(), r);
  }

  double mean_g = 0.0;
  for (double v : g) mean_g += v;
  mean_g /= n;

  WaveProfile& p = res.profile;
  p.x.resize(n);
  p.rho_x.resize(n);
  for (int i = 0; i < n; ++i) {
    p.x[i] = i * dx;
    const double fwd = rho[(i + 1) % n];
    const double bwd = rho[(i + n - 1) % n];
    p.rho_x[i] = (fwd - bwd) / (2.0 * dx);
  }
  p.rho = rho;
  p.omega = omega;
  // The eps part of g sums to zero, so mean(g) is the mean nodal W'.
  p.lambda = -mean_g;
  p.m = energy.m;
  p.average = std::accumulate(rho.begin(), rho.end(), 0.0) / n;
  p.eps = eps;
  res.iterations = iter;
  res.residual = r;
  res.energy = e;
  res.scaled_energy = e / std::sqrt(eps);
  return res;
}

double modica_mortola_slack(const DoubleWell& well, double eps, const WaveProfile& profile) {
  const std::size_t n = profile.rho.size();
  if (n < 2) return 0.0;
  const double dx = profile.x[1] - profile.x[0];
  auto root2w = [&](double r) { return std::sqrt(2.0 * std::max(0.0, well.value(r))); };
  const std::size_t segments = profile.periodic() ? n : n - 1;
  long double energy = 0.0L;
  long double tv = 0.0L;
  for (std::size_t i = 0; i < segments; ++i) {
    const double a = profile.rho[i];
    const double b = profile.rho[(i + 1) % n];
    const double d = b - a;
    double pot = 0.0;
    for (std::size_t k = 0; k < 5; ++k) pot += GL::weights[k] * well.value(a + GL::nodes[k] * d);
    energy += 0.5L * eps * d * d / dx + static_cast<long double>(dx * pot);
    if (a != b) {
      tv += std::abs(quad::adaptive_gauss(root2w, std::min(a, b), std::max(a, b), 1e-16, 30));
    }
  }
  return static_cast<double>(energy / std::sqrt(static_cast<long double>(eps)) - tv);
}

// ---------------------------------------------------------------------------
// Orbits

namespace {

// integral over t in [0, 1] of (1 - t) W''(base + dir (off + t v)).
double curvature_mean(const DoubleWell& well, double base, double dir, double off, double v) {
  double acc = 0.0;
  for (int half = 0; half < 2; ++half) {
    const double t0 = 0.5 * half;
    for (std::size_t k = 0; k < 5; ++k) {
      const double t = t0 + 0.5 * GL::nodes[k];
      acc += 0.5 * GL::weights[k] * (1.0 - t) * well.second(base + dir * (off + t * v));
    }
  }
  return acc;
}

// integral over t in [0, 1] of W''(base + dir (off + t v)).
double slope_mean(const DoubleWell& well, double base, double dir, double off, double v) {
  double acc = 0.0;
  for (int half = 0; half < 2; ++half) {
    for (std::size_t k = 0; k < 5; ++k) {
      const double t = 0.5 * half + 0.5 * GL::nodes[k];
      acc += 0.5 * GL::weights[k] * well.second(base + dir * (off + t * v));
    }
  }
  return acc;
}

// W(base + dir z) = z^2 curvature_mean(.., 0, z) since W and W' vanish at the wells.
double well_value(const DoubleWell& well, double base, double dir, double z) {
  return z * z * curvature_mean(well, base, dir, 0.0, z);
}

// Offset of the local minimum of W + lambda q next to the well.
double local_min_offset(const DoubleWell& well, double base, double dir, double lambda) {
  double z = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double r = slope_mean(well, base, dir, 0.0, z);
    if (!(r > 0.0)) throw DomainError("orbit: W + lambda q has no local minimum near a well");
    const double next = -dir * lambda / r;
    if (std::abs(next - z) <= 1e-16 * std::abs(next)) return next;
    z = next;
  }
  return z;
}

struct LocalMinima {
  double z;   // rho_g + z
  double y;   // rho_l - y
  double dm;  // (W + lambda q)(liquid minimum) - (W + lambda q)(vapour minimum)
};

LocalMinima local_minima(const DoubleWell& well, double lambda) {
  const Bitangent& bit = well.bitangent();
  LocalMinima lm{};
  lm.z = local_min_offset(well, bit.rho_g, 1.0, lambda);
  lm.y = local_min_offset(well, bit.rho_l, -1.0, lambda);
  lm.dm = well_value(well, bit.rho_l, -1.0, lm.y) - well_value(well, bit.rho_g, 1.0, lm.z) +
          lambda * (bit.width() - lm.y - lm.z);
  return lm;
}

// lambda with dm(lambda) = target; d dm / d lambda is the distance of the minima.
double lambda_for_gap(const DoubleWell& well, double target) {
  const double width = well.bitangent().width();
  double lambda = target / width;
  for (int it = 0; it < 100; ++it) {
    const LocalMinima lm = local_minima(well, lambda);
    const double step = (lm.dm - target) / (width - lm.y - lm.z);
    lambda -= step;
    if (std::abs(step) <= 1e-16 * std::abs(lambda) || step == 0.0) return lambda;
  }
  return lambda;
}

// w with (W + lambda q)(local min + w) - (local min value) = depth.
double turning_offset(const DoubleWell& well, double base, double dir, double off, double depth) {
  double w = std::sqrt(depth / curvature_mean(well, base, dir, off, 0.0));
  for (int it = 0; it < 100; ++it) {
    const double f = w * w * curvature_mean(well, base, dir, off, w) - depth;
    const double df = w * slope_mean(well, base, dir, off, w);
    if (!(df > 0.0) || !std::isfinite(w)) {
      throw DomainError("orbit: level above the central barrier, orbit not closed");
    }
    double next = w - f / df;
    if (next <= 0.0) next = 0.5 * w;
    if (std::abs(next - w) <= 1e-15 * w) return next;
    w = next;
  }
  return w;
}

OrbitParams assemble_orbit(const DoubleWell& well, double lambda, const LocalMinima& lm,
                           double depth_minus, double depth_plus) {
  const Bitangent& bit = well.bitangent();
  if (!(depth_minus > 0.0) || !(depth_plus > 0.0)) {
    throw DomainError("orbit: well depths must be positive");
  }
  OrbitParams p;
  p.lambda = lambda;
  p.z_min = lm.z;
  p.y_min = lm.y;
  p.depth_minus = depth_minus;
  p.depth_plus = depth_plus;
  p.w_minus = turning_offset(well, bit.rho_g, 1.0, lm.z, depth_minus);
  p.w_plus = turning_offset(well, bit.rho_l, -1.0, lm.y, depth_plus);
  p.d_minus = lm.z + p.w_minus;
  p.d_plus = lm.y + p.w_plus;
  if (!(p.d_minus + p.d_plus < bit.width())) {
    throw DomainError("orbit: turning points cross, orbit not closed");
  }
  p.q_minus = bit.rho_g + p.d_minus;
  p.q_plus = bit.rho_l - p.d_plus;
  const double vapour_min = well_value(well, bit.rho_g, 1.0, lm.z) + lambda * (bit.rho_g + lm.z);
  p.H0 = -vapour_min - depth_minus;
  return p;
}

}  // namespace

OrbitParams orbit_from_depths(const DoubleWell& well, double depth_minus, double depth_plus) {
  const double lambda = lambda_for_gap(well, depth_minus - depth_plus);
  return assemble_orbit(well, lambda, local_minima(well, lambda), depth_minus, depth_plus);
}

OrbitParams orbit_from_offsets(const DoubleWell& well, double d_minus, double d_plus) {
  const Bitangent& bit = well.bitangent();
  if (!(d_minus > 0.0) || !(d_plus > 0.0) || !(d_minus + d_plus < bit.width())) {
    throw DomainError("orbit_from_offsets: offsets must be positive with d- + d+ < width");
  }
  const double w_minus = well_value(well, bit.rho_g, 1.0, d_minus);
  const double w_plus = well_value(well, bit.rho_l, -1.0, d_plus);
  const double lambda = -(w_plus - w_minus) / (bit.width() - d_minus - d_plus);
  const LocalMinima lm = local_minima(well, lambda);
  OrbitParams p;
  p.lambda = lambda;
  p.z_min = lm.z;
  p.y_min = lm.y;
  p.d_minus = d_minus;
  p.d_plus = d_plus;
  p.w_minus = d_minus - lm.z;
  p.w_plus = d_plus - lm.y;
  if (!(p.w_minus > 0.0) || !(p.w_plus > 0.0)) {
    throw DomainError("orbit_from_offsets: a turning point lies beyond the local minimum");
  }
  p.depth_minus = p.w_minus * p.w_minus * curvature_mean(well, bit.rho_g, 1.0, lm.z, p.w_minus);
  p.depth_plus = p.w_plus * p.w_plus * curvature_mean(well, bit.rho_l, -1.0, lm.y, p.w_plus);
  p.q_minus = bit.rho_g + d_minus;
  p.q_plus = bit.rho_l - d_plus;
  p.H0 = -w_minus - lambda * p.q_minus;
  return p;
}

OrbitParams orbit_from_level(const DoubleWell& well, double H0, double lambda) {
  const Bitangent& bit = well.bitangent();
  const LocalMinima lm = local_minima(well, lambda);
  const double vapour_min = well_value(well, bit.rho_g, 1.0, lm.z) + lambda * (bit.rho_g + lm.z);
  const double liquid_min = well_value(well, bit.rho_l, -1.0, lm.y) + lambda * (bit.rho_l - lm.y);
  OrbitParams p = assemble_orbit(well, lambda, lm, -H0 - vapour_min, -H0 - liquid_min);
  p.H0 = H0;
  return p;
}

PeriodicOrbit::PeriodicOrbit(DoubleWell well, double eps, OrbitParams params)
    : well_(std::move(well)), eps_(eps), params_(params) {
  const Bitangent& bit = well_.bitangent();
  if (!(params_.w_minus > 0.0) || !(params_.w_plus > 0.0) || !(eps > 0.0)) {
    throw DomainError("PeriodicOrbit: turning points must lie strictly between the wells");
  }
  const double mid = bit.mid();
  split_ = (params_.q_minus < mid && mid < params_.q_plus)
               ? mid
               : 0.5 * (params_.q_minus + params_.q_plus);
  const double scale = std::sqrt(0.5 * eps_);

  left_ = Branch{bit.rho_g, 1.0, params_.z_min, params_.w_minus, 0.0, 0.0, {}};
  right_ = Branch{bit.rho_l, -1.0, params_.y_min, params_.w_plus, 0.0, 0.0, {}};
  for (Branch* b : {&left_, &right_}) {
    const double v_split = b->dir * (split_ - b->base) - b->off;
    if (!(v_split >= b->w)) throw DomainError("PeriodicOrbit: split outside the orbit");
    b->t_end = std::acosh(v_split / b->w);
    const Branch& cb = *b;
    const Cumulative c =
        Cumulative::build([&](double t) { return integrand(cb, t); }, 0.0, b->t_end, 0.02, scale);
    for (double v : c.cum) {
      if (!std::isfinite(v)) throw DomainError("PeriodicOrbit: potential gap not positive");
    }
    b->panel = c.panel;
    b->cumulative = c.cum;
  }
  x_split_ = left_.cumulative.back();
  const double half = x_split_ + right_.cumulative.back();
  period_ = 2.0 * half;

  double moment = 0.0;
  for (const Branch* b : {&left_, &right_}) {
    auto qg = [&](double t) {
      return (b->base + b->dir * (b->off + b->w * std::cosh(t))) * integrand(*b, t);
    };
    for (std::size_t k = 0; k + 1 < b->cumulative.size(); ++k) {
      moment += quad::gauss5(qg, k * b->panel, (k + 1) * b->panel);
    }
  }
  average_ = scale * moment / half;
}

// V = (v - w)(v + w) S(v) + w^2 (v - w) S[w, v] with S the curvature mean.
double PeriodicOrbit::reduced_gap(const Branch& b, double v) const {
  auto S = [&](double s) { return curvature_mean(well_, b.base, b.dir, b.off, s); };
  const double sw = S(b.w);
  return S(v) + b.w * b.w * divided(S, b.w, v, sw) / (v + b.w);
}

// dz / sqrt(2 V / eps) with v = w cosh t: the turning point factor cancels.
double PeriodicOrbit::integrand(const Branch& b, double t) const {
  return 1.0 / std::sqrt(reduced_gap(b, b.w * std::cosh(t)));
}

double PeriodicOrbit::invert(const Branch& b, double target) const {
  Cumulative c;
  c.t0 = 0.0;
  c.panel = b.panel;
  c.cum = b.cumulative;
  return c.invert([&](double t) { return integrand(b, t); }, std::sqrt(0.5 * eps_), target);
}

HermiteSample PeriodicOrbit::at(double x) const {
  double xr = x - period_ * std::floor(x / period_);
  double sign = 1.0;
  const double half = 0.5 * period_;
  if (xr > half) {
    xr = period_ - xr;
    sign = -1.0;
  }
  const bool left = xr <= x_split_;
  const Branch& b = left ? left_ : right_;
  const double t = invert(b, left ? xr : half - xr);
  const double v = b.w * std::cosh(t);
  const double sh = b.w * std::sinh(t);
  const double gap = sh * sh * reduced_gap(b, v);
  const double q = b.base + b.dir * (b.off + v);
  return {q, sign * std::sqrt(2.0 * std::max(0.0, gap) / eps_)};
}

double PeriodicOrbit::hamiltonian(double q, double p) const {
  return 0.5 * eps_ * p * p - well_.value(q) - params_.lambda * q;
}

double PeriodicOrbit::potential_gap(double q) const {
  return 2.0 * (params_.H0 + well_.value(q) + params_.lambda * q) / eps_;
}

WaveProfile PeriodicOrbit::sample(int n) const {
  WaveProfile p;
  p.x.resize(n);
  p.rho.resize(n);
  p.rho_x.resize(n);
  const double dx = period_ / n;
  for (int i = 0; i < n; ++i) {
    p.x[i] = i * dx;
    const HermiteSample s = at(p.x[i]);
    p.rho[i] = s.value;
    p.rho_x[i] = s.deriv;
  }
  p.omega = period_;
  p.lambda = params_.lambda;
  p.m = well_.model().m;
  p.average = average_;
  p.eps = eps_;
  return p;
}

OrbitPeriod orbit_period_and_average(const DoubleWell& well, double eps,
                                     const OrbitParams& orbit) {
  const PeriodicOrbit po(well, eps, orbit);
  return {po.period(), po.average()};
}

OrbitPeriod orbit_period_and_average(const EnergyModel& energy, double eps,
                                     const OrbitParams& orbit) {
  return orbit_period_and_average(make_well(energy), eps, orbit);
}

PeriodicOrbit find_periodic_orbit(const EnergyModel& energy, double eps, double omega, double a,
                                  const OrbitSolveOptions& options) {
  const DoubleWell well = make_well(energy);
  const Bitangent& bit = well.bitangent();
  if (!(a > bit.rho_g && a < bit.rho_l)) {
    throw DomainError("find_periodic_orbit: average outside the wells");
  }
  const double width = bit.width();

  struct Eval {
    bool ok;
    double r1, r2;
  };
  auto evaluate = [&](double sm, double sp) -> Eval {
    try {
      const PeriodicOrbit po(well, eps, orbit_from_depths(well, std::exp(sm), std::exp(sp)));
      return {true, po.period() / omega - 1.0, (po.average() - a) / width};
    } catch (const DomainError&) {
      return {false, 0, 0};
    }
  };

  double sm = std::log(well_value(well, bit.rho_g, 1.0, 0.05 * width));
  double sp = std::log(well_value(well, bit.rho_l, -1.0, 0.05 * width));
  if (options.seed_log_depths) {
    sm = options.seed_log_depths->first;
    sp = options.seed_log_depths->second;
  }
  Eval cur = evaluate(sm, sp);
  if (!cur.ok) throw DomainError("find_periodic_orbit: seed orbit is not closed");
  auto norm = [](const Eval& e) { return std::hypot(e.r1, e.r2); };
  auto done = [&](const Eval& e, double slack) {
    return std::abs(e.r1) <= slack * options.tol && std::abs(e.r2) * width <= slack * options.tol;
  };
  auto result = [&] {
    return PeriodicOrbit(well, eps, orbit_from_depths(well, std::exp(sm), std::exp(sp)));
  };
  for (int it = 0; it < options.max_iter; ++it) {
    if (done(cur, 1.0)) return result();
    const double h = 1e-6 * std::max(1.0, 0.5 * (std::abs(sm) + std::abs(sp)));
    const Eval em = evaluate(sm + h, sp);
    const Eval emm = evaluate(sm - h, sp);
    const Eval ep = evaluate(sm, sp + h);
    const Eval epm = evaluate(sm, sp - h);
    if (!em.ok || !emm.ok || !ep.ok || !epm.ok) {
      throw ConvergenceError("find_periodic_orbit: Jacobian stencil left the orbit family",
                             norm(cur));
    }
    const double j11 = (em.r1 - emm.r1) / (2 * h), j12 = (ep.r1 - epm.r1) / (2 * h);
    const double j21 = (em.r2 - emm.r2) / (2 * h), j22 = (ep.r2 - epm.r2) / (2 * h);
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) {
      throw ConvergenceError("find_periodic_orbit: singular Jacobian", norm(cur));
    }
    const double dsm = -(j22 * cur.r1 - j12 * cur.r2) / det;
    const double dsp = -(-j21 * cur.r1 + j11 * cur.r2) / det;
    double damp = 1.0;
    const double big = std::max(std::abs(dsm), std::abs(dsp));
    if (big > 10.0) damp = 10.0 / big;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eval trial = evaluate(sm + damp * dsm, sp + damp * dsp);
      if (trial.ok && norm(trial) < norm(cur)) {
        sm += damp * dsm;
        sp += damp * dsp;
        cur = trial;
        moved = true;
        break;
      }
      damp *= 0.5;
    }
    if (!moved) {
      if (done(cur, 100.0)) return result();
      throw ConvergenceError("find_periodic_orbit: Newton stalled", norm(cur));
    }
  }
  throw ConvergenceError("find_periodic_orbit: iteration limit", norm(cur));
}

WaveProfile solve_periodic_orbit(const EnergyModel& energy, double eps, double omega, double a,
                                 const OrbitSolveOptions& options) {
  const PeriodicOrbit orbit = find_periodic_orbit(energy, eps, omega, a, options);
  const int n = options.n > 0 ? options.n : default_points(eps, omega);
  return orbit.sample(n);
}

namespace {

// Depths decay like exp(-c omega): scale the logs with the period.
std::pair<double, double> continued_seed(const OrbitParams& p, double ratio) {
  return {ratio * std::log(p.depth_minus), ratio * std::log(p.depth_plus)};
}

}  // namespace

std::vector<LambdaPoint> lambda_decay(const EnergyModel& energy, double eps, double a,
                                      const std::vector<double>& omegas) {
  std::vector<LambdaPoint> out;
  OrbitSolveOptions opts;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double omega = omegas[i];
    if (i > 0 && !(omega > omegas[i - 1])) {
      throw DomainError("lambda_decay: omegas must increase");
    }
    const PeriodicOrbit orbit = find_periodic_orbit(energy, eps, omega, a, opts);
    out.push_back({omega, orbit.params().lambda});
    if (i + 1 < omegas.size()) {
      opts.seed_log_depths = continued_seed(orbit.params(), omegas[i + 1] / omega);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kink

Kink::Kink(DoubleWell well, double eps) : well_(std::move(well)), eps_(eps) {
  mid_ = well_.bitangent().mid();
}

// With z = e^tau, dz / sqrt(2 W / eps) = sqrt(eps / 2) dtau / sqrt(Q(z)).
double Kink::left_log_integrand(double tau) const {
  return 1.0 / std::sqrt(curvature_mean(well_, well_.bitangent().rho_g, 1.0, 0.0, std::exp(tau)));
}

double Kink::right_log_integrand(double tau) const {
  return 1.0 / std::sqrt(curvature_mean(well_, well_.bitangent().rho_l, -1.0, 0.0, std::exp(tau)));
}

double Kink::position(double rho) const {
  const Bitangent& bit = well_.bitangent();
  const double scale = std::sqrt(0.5 * eps_);
  if (!(rho > bit.rho_g && rho < bit.rho_l)) {
    throw DomainError("Kink::position: density outside the open phase interval");
  }
  if (rho <= mid_) {
    const double top = std::log(mid_ - bit.rho_g);
    const double tau = std::log(rho - bit.rho_g);
    return -scale * quad::adaptive_gauss([this](double s) { return left_log_integrand(s); },
                                         tau, top, 1e-15);
  }
  const double top = std::log(bit.rho_l - mid_);
  const double tau = std::log(bit.rho_l - rho);
  return scale * quad::adaptive_gauss([this](double s) { return right_log_integrand(s); }, tau,
                                      top, 1e-15);
}

double Kink::value(double x) const {
  const Bitangent& bit = well_.bitangent();
  const double scale = std::sqrt(0.5 * eps_);
  const bool left = x < 0.0;
  const double base = left ? bit.rho_g : bit.rho_l;
  const double top = std::log(left ? mid_ - bit.rho_g : bit.rho_l - mid_);
  auto h = [&](double tau) { return left ? left_log_integrand(tau) : right_log_integrand(tau); };
  const double target = std::abs(x);
  if (target == 0.0) return mid_;
  // Integrate downward from top in tau until the target distance is reached.
  double tau = top;
  double acc = 0.0;
  constexpr double kStep = 0.25;
  for (int k = 0; k < 4000; ++k) {
    const double piece = scale * quad::gauss5(h, tau - kStep, tau);
    if (acc + piece >= target) {
      double lo = tau - kStep;
      double hi = tau;
      double t = tau - kStep * (target - acc) / piece;
      for (int it = 0; it < 60; ++it) {
        const double f = acc + scale * quad::gauss5(h, t, tau) - target;
        if (f > 0.0) lo = t; else hi = t;
        double next = t + f / (scale * h(t));
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) {
          t = next;
          break;
        }
        t = next;
      }
      const double off = std::exp(t);
      return left ? base + off : base - off;
    }
    acc += piece;
    tau -= kStep;
    if (std::exp(tau) < 1e-300) break;
  }
  return base;
}

double Kink::slope(double x) const {
  const double rho = value(x);
  return std::sqrt(2.0 * std::max(0.0, well_.value(rho)) / eps_);
}

WaveProfile kink_profile(const EnergyModel& energy, double eps, double window, int n) {
  if (!(eps > 0.0)) throw DomainError("kink_profile: eps must be positive");
  if (window <= 0.0) window = 40.0 * std::sqrt(eps);
  if (n <= 0) n = 2 * static_cast<int>(std::ceil(20.0 * window / std::sqrt(eps))) + 1;
  const Kink kink(make_well(energy), eps);
  WaveProfile p;
  p.x.resize(n);
  p.rho.resize(n);
  p.rho_x.resize(n);
  for (int i = 0; i < n; ++i) {
    p.x[i] = -window + 2.0 * window * i / (n - 1);
    p.rho[i] = kink.value(p.x[i]);
    p.rho_x[i] = kink.slope(p.x[i]);
  }
  p.omega = kInf;
  p.lambda = 0.0;
  p.m = energy.m;
  p.eps = eps;
  return p;
}

std::vector<KinkDistance> kink_limit_check(const EnergyModel& energy, double eps,
                                           const std::vector<double>& omegas, double a) {
  const Kink kink(make_well(energy), eps);
  const double level = bitangent(energy).mid();
  std::vector<KinkDistance> out;
  OrbitSolveOptions opts;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double omega = omegas[i];
    const PeriodicOrbit orbit = find_periodic_orbit(energy, eps, omega, a, opts);
    if (i + 1 < omegas.size()) {
      opts.seed_log_depths = continued_seed(orbit.params(), omegas[i + 1] / omega);
    }
    // Upcrossing of the mid level on the rising half.
    double lo = 0.0;
    double hi = 0.5 * orbit.period();
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (orbit.at(mid).value < level) lo = mid; else hi = mid;
    }
    const double x0 = 0.5 * (lo + hi);
    constexpr int kPoints = 4001;
    double dist = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double x = -0.25 * omega + 0.5 * omega * i / (kPoints - 1);
      dist = std::max(dist, std::abs(orbit.at(x0 + x).value - kink.value(x)));
    }
    out.push_back({omega, dist});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Galilean assembly

double TravelingWave::rho(double x, double t) const { return profile.value_at(x - c * t); }

double TravelingWave::u(double x, double t) const { return c + m / rho(x, t); }

TravelingWave galilean_assemble(const WaveProfile& profile, double m, double u1) {
  if (std::abs(m - profile.m) > 1e-12 * std::max(1.0, std::abs(m))) {
    std::ostringstream msg;
    msg << "galilean_assemble: m = " << m << " but the profile was built for m = " << profile.m;
    throw DomainError(msg.str());
  }
  if (profile.rho.empty()) throw DomainError("galilean_assemble: empty profile");
  double vapour = profile.rho.front();
  double liquid = profile.rho.back();
  if (profile.periodic()) {
    const auto [lo, hi] = std::minmax_element(profile.rho.begin(), profile.rho.end());
    vapour = *lo;
    liquid = *hi;
  }
  TravelingWave w{profile, 0.0, m, u1, 0.0, m != 0.0};
  w.c = u1 - m / vapour;
  w.u2 = w.c + m / liquid;
  w.profile.c = w.c;
  return w;
}

double translation_distance(const WaveProfile& profile, const std::function<double(double)>& f,
                            double period) {
  auto dist = [&](double s) {
    double d = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      d = std::max(d, std::abs(profile.rho[i] - f(profile.x[i] + s)));
    }
    return d;
  };
  constexpr int kScan = 400;
  double best_s = 0.0;
  double best = kInf;
  for (int i = 0; i < kScan; ++i) {
    const double s = period * i / kScan;
    const double d = dist(s);
    if (d < best) {
      best = d;
      best_s = s;
    }
  }
  const double step = period / kScan;
  const auto r = boost::math::tools::brent_find_minima(dist, best_s - step, best_s + step, 52);
  return std::min(best, r.second);
}

std::optional<double> profile_upcrossing(const WaveProfile& profile, double level) {
  const std::size_t n = profile.size();
  const std::size_t last = profile.periodic() ? n : n - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const double a = profile.rho[i];
    const double b = profile.rho[(i + 1) % n];
    if (a < level && b >= level) {
      const double dx = n > 1 ? profile.x[1] - profile.x[0] : 0.0;
      return profile.x[i] + dx * (level - a) / (b - a);
    }
  }
  return std::nullopt;
}

}  // namespace nsk
