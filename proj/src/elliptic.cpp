#include "nsk/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "nsk/errors.hpp"

namespace nsk {

namespace {

constexpr double kPi = std::numbers::pi;

double agm(double a, double b) {
  for (int i = 0; i < 64 && std::abs(a - b) > 4.0 * std::numeric_limits<double>::epsilon() * a; ++i) {
    const double next = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = next;
  }
  return 0.5 * (a + b);
}

double complement_of(double k) { return std::sqrt((1.0 - k) * (1.0 + k)); }

}  // namespace

double elliptic_K_from_complement(double kc) {
  if (!(kc > 0.0) || kc > 1.0) {
    std::ostringstream msg;
    msg << "elliptic_K: complementary modulus must lie in (0, 1], got " << kc;
    throw DomainError(msg.str());
  }
  return kPi / (2.0 * agm(1.0, kc));
}

double elliptic_K(double k) {
  if (!(k >= 0.0) || !(k < 1.0)) {
    std::ostringstream msg;
    msg << "elliptic_K: modulus must satisfy 0 <= k < 1, got " << k;
    throw DomainError(msg.str());
  }
  return elliptic_K_from_complement(complement_of(k));
}

JacobiTriple jacobi_sncndn(double u, double k, double kc) {
  if (!(k >= 0.0) || !(k <= 1.0) || !(kc >= 0.0) || !(kc <= 1.0)) {
    std::ostringstream msg;
    msg << "jacobi_sncndn: invalid modulus k = " << k;
    throw DomainError(msg.str());
  }
  if (kc == 0.0) {
    const double sech = 1.0 / std::cosh(u);
    return {std::tanh(u), sech, sech};
  }
  if (k == 0.0) {
    return {std::sin(u), std::cos(u), 1.0};
  }

  // sn has period 4K; reducing first keeps the Landen phase small.
  const double quarter = elliptic_K_from_complement(kc);
  u = std::remainder(u, 4.0 * quarter);

  constexpr int kMaxLevels = 32;
  std::array<double, kMaxLevels + 1> a{};
  std::array<double, kMaxLevels + 1> c{};
  a[0] = 1.0;
  c[0] = k;
  double b = kc;
  int levels = 0;
  while (levels < kMaxLevels &&
         std::abs(c[levels]) > std::numeric_limits<double>::epsilon() * a[levels]) {
    a[levels + 1] = 0.5 * (a[levels] + b);
    c[levels + 1] = 0.5 * (a[levels] - b);
    b = std::sqrt(a[levels] * b);
    ++levels;
  }

  double phi = std::ldexp(a[levels] * u, levels);
  for (int i = levels; i > 0; --i) {
    phi = 0.5 * (phi + std::asin(c[i] / a[i] * std::sin(phi)));
  }
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn^2 = k'^2 + k^2 cn^2 avoids the cancellation in 1 - k^2 sn^2 near k = 1.
  const double dn = std::sqrt(kc * kc + k * k * cn * cn);
  return {sn, cn, dn};
}

double jacobi_sn(double u, double k) {
  if (!(k >= 0.0) || !(k <= 1.0)) {
    std::ostringstream msg;
    msg << "jacobi_sn: modulus must satisfy 0 <= k <= 1, got " << k;
    throw DomainError(msg.str());
  }
  return jacobi_sncndn(u, k, complement_of(k)).sn;
}

// ---------------------------------------------------------------------------
// Cnoidal equilibrium

double cnoidal_eps_limit() { return 1.0 / (16.0 * kPi * kPi); }

double CnoidalParams::period() const {
  return pi_scaled_argument ? kPi : 4.0 * K / wavenumber;
}

namespace {

// Modulus parametrised by s = -log(k'), which resolves k' down to 1e-300.
struct Modulus {
  double k, kc, K;
};

Modulus modulus_from_log(double s) {
  const double kc = std::exp(-s);
  const double k = std::sqrt(-std::expm1(-2.0 * s));
  return {k, kc, elliptic_K_from_complement(kc)};
}

double relation(const Modulus& mod, double eps) {
  return eps * 64.0 * (1.0 + mod.k * mod.k) * mod.K * mod.K - 1.0;
}

}  // namespace

CnoidalParams k_from_eps(double eps) {
  if (!(eps > 0.0) || !(eps < cnoidal_eps_limit())) {
    std::ostringstream msg;
    msg << "no cnoidal wave at eps = " << eps << " (need 0 < eps < 1/(16 pi^2) = "
        << cnoidal_eps_limit() << ")";
    throw NoCnoidalWaveError(msg.str());
  }

  // f(s) increases from 16 pi^2 eps - 1 < 0 at s = 0 to +inf.
  double lo = 0.0;
  double hi = 1.0;
  while (relation(modulus_from_log(hi), eps) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 690.0) {
      throw NoCnoidalWaveError("k_from_eps: eps too small to resolve k");
    }
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    (relation(modulus_from_log(mid), eps) < 0.0 ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);

  // Newton polish with a centred difference derivative.
  for (int i = 0; i < 3; ++i) {
    const double f = relation(modulus_from_log(s), eps);
    const double ds = 1e-6 * std::max(1.0, s);
    const double df = (relation(modulus_from_log(s + ds), eps) -
                       relation(modulus_from_log(s - ds), eps)) /
                      (2.0 * ds);
    const double next = s - f / df;
    if (!(next > 0.0) ||
        std::abs(relation(modulus_from_log(next), eps)) >= std::abs(f)) {
      break;
    }
    s = next;
  }

  const Modulus mod = modulus_from_log(s);
  if (!(mod.k > 0.0)) {
    throw NoCnoidalWaveError("k_from_eps: degenerate modulus k = 0");
  }
  CnoidalParams p;
  p.k = mod.k;
  p.kc = mod.kc;
  p.K = mod.K;
  p.eps = eps;
  p.amplitude = 0.5 * std::sqrt(2.0 * p.k * p.k / (1.0 + p.k * p.k));
  p.wavenumber = 4.0 * p.K;
  return p;
}

double cnoidal_relation_residual(const CnoidalParams& params) {
  return params.eps * 64.0 * (1.0 + params.k * params.k) * params.K * params.K - 1.0;
}

namespace {

double argument_scale(const CnoidalParams& p) {
  return p.pi_scaled_argument ? p.wavenumber / kPi : p.wavenumber;
}

}  // namespace

double cnoidal_profile(const CnoidalParams& p, double x) {
  const double b = argument_scale(p);
  return 1.5 + p.amplitude * jacobi_sncndn(b * x, p.k, p.kc).sn;
}

double cnoidal_slope(const CnoidalParams& p, double x) {
  const double b = argument_scale(p);
  const JacobiTriple j = jacobi_sncndn(b * x, p.k, p.kc);
  return p.amplitude * b * j.cn * j.dn;
}

double cnoidal_curvature(const CnoidalParams& p, double x) {
  // sn'' = -(1 + k^2) sn + 2 k^2 sn^3
  const double b = argument_scale(p);
  const double s = jacobi_sncndn(b * x, p.k, p.kc).sn;
  const double k2 = p.k * p.k;
  return p.amplitude * b * b * (-(1.0 + k2) * s + 2.0 * k2 * s * s * s);
}

double cnoidal_third(const CnoidalParams& p, double x) {
  const double b = argument_scale(p);
  const JacobiTriple j = jacobi_sncndn(b * x, p.k, p.kc);
  const double k2 = p.k * p.k;
  return p.amplitude * b * b * b * (-(1.0 + k2) + 6.0 * k2 * j.sn * j.sn) * j.cn * j.dn;
}

FlowPoint exact_solution(const CnoidalParams& params, double ubar, double x, double t) {
  const double period = params.period();
  double xi = std::fmod(x - ubar * t, period);
  if (xi < 0.0) {
    xi += period;
  }
  return {cnoidal_profile(params, xi), ubar};
}

}  // namespace nsk
