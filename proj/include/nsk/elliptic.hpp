#pragma once

namespace nsk {

/// Complete elliptic integral of the first kind, K(k) = pi / (2 AGM(1, k')).
/// Requires 0 <= k < 1.
double elliptic_K(double k);

/// K expressed through the complementary modulus k' = sqrt(1 - k^2); keeps
/// full relative precision when k is so close to 1 that it rounds to 1.
double elliptic_K_from_complement(double kc);

struct JacobiTriple {
  double sn;
  double cn;
  double dn;
};

/// Jacobi elliptic functions by the descending Landen (AGM) recursion.
/// The modulus is passed as (k, k') so that k' carries full precision.
JacobiTriple jacobi_sncndn(double u, double k, double kc);

/// sn(u, k) for 0 <= k <= 1.
double jacobi_sn(double u, double k);

/// Parameters of the period-1 cnoidal equilibrium
///   rho(x) = 3/2 + A sn(4 K(k) x, k),   A = sqrt(2 k^2 / (1 + k^2)) / 2,
/// with k fixed by eps * 64 (1 + k^2) K(k)^2 = 1.
struct CnoidalParams {
  double k = 0.0;
  double kc = 1.0;  // complementary modulus
  double K = 0.0;
  double eps = 0.0;
  double amplitude = 0.0;
  double wavenumber = 0.0;  // 4 K(k)
  // Evaluate sn(4 K x / pi, k) instead: the literal variant with period pi,
  // kept only for side-by-side comparison.
  bool pi_scaled_argument = false;

  double period() const;
};

/// Largest admissible Korteweg parameter (the k -> 0 limit), 1 / (16 pi^2).
double cnoidal_eps_limit();

/// Solve for the modulus. Throws NoCnoidalWaveError unless 0 < eps < 1/(16 pi^2).
CnoidalParams k_from_eps(double eps);

/// eps * 64 (1 + k^2) K^2 - 1 for the stored parameters.
double cnoidal_relation_residual(const CnoidalParams& params);

double cnoidal_profile(const CnoidalParams& params, double x);
double cnoidal_slope(const CnoidalParams& params, double x);
double cnoidal_curvature(const CnoidalParams& params, double x);
double cnoidal_third(const CnoidalParams& params, double x);

struct FlowPoint {
  double rho;
  double u;
};

/// Travelling cnoidal wave (rho~(x - ubar t), ubar).
FlowPoint exact_solution(const CnoidalParams& params, double ubar, double x, double t);

}  // namespace nsk
