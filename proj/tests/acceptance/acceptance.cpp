// Acceptance run: one PASS/FAIL line per primary criterion.
#include <CLI11.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nsk/cip.hpp"
#include "nsk/cli.hpp"
#include "nsk/diagnostics.hpp"
#include "nsk/elliptic.hpp"
#include "nsk/energy.hpp"
#include "nsk/hermite.hpp"
#include "nsk/io.hpp"
#include "nsk/twave.hpp"

using namespace nsk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back((ok ? "" : "!") + what);
  }
};

double lookup(const KeyValues& kv, const std::string& key) {
  for (const auto& [k, v] : kv) {
    if (k == key) {
      try {
        return std::stod(v);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct Options {
  bool full = false;
  bool strict = false;
  std::string outdir;
  std::set<int> only;
};

struct Run {
  SimConfig cfg;
  RunResult result;
  KeyValues summary;
  double seconds;
};

// Runs shared between criteria (3, 4 and 6 feed 5, 7 and 11).
struct Shared {
  std::vector<std::pair<std::string, double>> drifts;
  std::optional<Run> fig3;
  std::optional<Run> fig4;
};

Run simulate(const SimConfig& cfg, const Options& opt, const std::string& tag) {
  const auto t0 = Clock::now();
  RunObserver obs;
  obs.on_warning = [&](const std::string& w) { std::cerr << tag << ": " << w << '\n'; };
  RunResult r = run(cfg, obs);
  const double secs = seconds_since(t0);
  KeyValues summary = run_summary(cfg, r);
  if (!opt.outdir.empty()) {
    const auto dir = std::filesystem::path(opt.outdir) / tag;
    std::filesystem::create_directories(dir);
    std::ofstream snap(dir / "final.csv");
    write_snapshot(snap, r.final_state);
    std::ofstream series(dir / "series.csv");
    r.series.write_csv(series);
    std::ofstream report(dir / "report.txt");
    write_key_values(report, config_echo(cfg));
    write_key_values(report, summary);
  }
  return Run{cfg, std::move(r), std::move(summary), secs};
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  Verdict v;
  const auto t0 = Clock::now();
  for (StencilKind k : {StencilKind::D2, StencilKind::D3, StencilKind::D4}) {
    const ExactnessReport r = exactness_gate(k, 4);
    const char* name = k == StencilKind::D2 ? "D2" : k == StencilKind::D3 ? "D3" : "D4";
    v.check(r.certified_degree >= 4, std::string(name) + " degree " + std::to_string(r.certified_degree));
  }
  const ExactnessReport printed = exactness_gate(StencilKind::D4Printed, 4);
  v.check(printed.certified_degree < 4,
          "printed D4 degree " + std::to_string(printed.certified_degree));
  const double secs = seconds_since(t0);
  v.check(secs < 1.0, "time " + fmt(secs) + "s");
  return v;
}

Verdict criterion2() {
  Verdict v;
  const auto t0 = Clock::now();
  v.check(std::abs(elliptic_K(0.0) - std::numbers::pi / 2) <= 1e-12, "K(0)");
  // sn(F(phi, k), k) = sin(phi), F by adaptive Gauss-Kronrod on the defining integral
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double k = 0.99 * i / 19.0;
    for (int j = 0; j < 10; ++j) {
      const double phi = -1.4 + 2.9 * j / 9.0;
      const double u = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double t) { return 1.0 / std::sqrt(1.0 - k * k * std::sin(t) * std::sin(t)); }, 0.0,
          phi, 15, 1e-13);
      worst = std::max(worst, std::abs(jacobi_sn(u, k) - std::sin(phi)));
    }
  }
  v.check(worst <= 1e-10, "sn err " + fmt(worst) + " on 200 points");
  for (double eps : {1e-4, 1e-5}) {
    const double res = std::abs(cnoidal_relation_residual(k_from_eps(eps)));
    v.check(res <= 1e-12, "k_from_eps(" + fmt(eps) + ") residual " + fmt(res));
  }
  const double secs = seconds_since(t0);
  v.check(secs < 5.0, "time " + fmt(secs) + "s");
  return v;
}

Verdict criterion3(const Options& opt, Shared& shared) {
  Verdict v;
  SimConfig cfg;
  cfg.nx = 300;
  cfg.dt = 1.0 / 120000.0;
  cfg.t_end = 1e4 * cfg.dt;
  cfg.eps = 1e-4;
  cfg.mu_bar = 0.0;
  cfg.init.kind = "cnoidal";
  cfg.series_every = 100;
  const Run r = simulate(cfg, opt, "c3_cnoidal_ek");
  shared.drifts.emplace_back("c3", r.result.max_mass_drift);
  const CnoidalParams p = k_from_eps(cfg.eps);
  double du = 0.0, drho = 0.0;
  const auto& s = r.result.final_state;
  for (int j = 0; j < cfg.nx; ++j) {
    du = std::max(du, std::abs(s.u.values()[j]));
    drho = std::max(drho, std::abs(s.rho.values()[j] - cnoidal_profile(p, s.grid().node(j))));
  }
  v.check(r.result.steps == 10000, "steps " + std::to_string(r.result.steps));
  v.check(du <= 1e-3, "max|u| " + fmt(du));
  v.check(drho <= 1e-3, "max|rho-rho~| " + fmt(drho));
  v.check(r.seconds < 60.0, "time " + fmt(r.seconds) + "s");
  return v;
}

double exact_linf(const Run& r) {
  const CnoidalParams p = k_from_eps(r.cfg.eps);
  const auto& s = r.result.final_state;
  double e = 0.0;
  for (int j = 0; j < s.grid().nx(); ++j) {
    const FlowPoint x = exact_solution(p, r.cfg.init.ubar, s.grid().node(j), s.t);
    e = std::max(e, std::abs(s.rho.values()[j] - x.rho));
  }
  return e;
}

Verdict criterion4(const Options& opt, Shared& shared) {
  Verdict v;
  std::vector<double> hs, errs;
  double desk_seconds = 0.0;
  for (int nx : {75, 150, 300}) {
    SimConfig cfg;
    cfg.nx = nx;
    cfg.dt = 1.0 / (400.0 * nx);
    cfg.t_end = 0.2;
    cfg.eps = 1e-4;
    cfg.mu_bar = 0.1;
    cfg.init.kind = "cnoidal";
    cfg.init.ubar = 2.0;
    cfg.series_every = 50;
    const Run r = simulate(cfg, opt, "c4_exact_nx" + std::to_string(nx));
    shared.drifts.emplace_back("c4/nx" + std::to_string(nx), r.result.max_mass_drift);
    const double e = exact_linf(r);
    hs.push_back(1.0 / nx);
    errs.push_back(e);
    v.notes.push_back("nx " + std::to_string(nx) + " Linf " + fmt(e));
    if (nx == 150) {
      desk_seconds = r.seconds;
      v.check(e <= 2e-2, "desk Linf " + fmt(e) + " <= 2e-2");
    }
  }
  // least-squares slope of log err against log h
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    mx += std::log(hs[i]) / hs.size();
    my += std::log(errs[i]) / hs.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    sxy += (std::log(hs[i]) - mx) * (std::log(errs[i]) - my);
    sxx += (std::log(hs[i]) - mx) * (std::log(hs[i]) - mx);
  }
  const double order = sxy / sxx;
  const double o1 = std::log2(errs[0] / errs[1]);
  const double o2 = std::log2(errs[1] / errs[2]);
  v.check(order >= 1.5 && o1 >= 1.5 && o2 >= 1.5,
          "order " + fmt(order) + " (pairs " + fmt(o1) + ", " + fmt(o2) + ") >= 1.5");
  v.check(desk_seconds < 120.0, "desk time " + fmt(desk_seconds) + "s");
  if (opt.full) {
    SimConfig cfg;
    cfg.nx = 300;
    cfg.dt = 1.0 / 120000.0;
    cfg.t_end = 1.0;
    cfg.eps = 1e-4;
    cfg.mu_bar = 0.1;
    cfg.init.kind = "cnoidal";
    cfg.init.ubar = 2.0;
    cfg.series_every = 600;
    const Run r = simulate(cfg, opt, "c4_exact_long");
    shared.drifts.emplace_back("c4/long", r.result.max_mass_drift);
    const double e = exact_linf(r);
    v.check(e <= 2e-2, "long-run Linf " + fmt(e));
  }
  return v;
}

SimConfig phase_cell(double mu_bar, bool full) {
  SimConfig cfg;
  cfg.nx = 300;
  cfg.dt = 1.0 / 120000.0;
  cfg.t_end = full ? 25.0 : 5.0;
  cfg.eps = 1e-4;
  cfg.mu_bar = mu_bar;
  cfg.init.kind = "sine";
  cfg.init.amplitude = 0.3;
  cfg.series_every = full ? 600 : 120;
  return cfg;
}

Verdict criterion6(const Options& opt, Shared& shared) {
  Verdict v;
  {
    Run r = simulate(phase_cell(0.1, opt.full), opt, "c6_mu1e-1");
    shared.drifts.emplace_back("c6/mu1e-1", r.result.max_mass_drift);
    const double lo = lookup(r.summary, "rhomin"), hi = lookup(r.summary, "rhomax");
    const double flux = lookup(r.summary, "flux_mean_abs");
    v.check(std::abs(lo - 1.0) <= 0.05 && std::abs(hi - 2.0) <= 0.05,
            "mu 1e-1 plateaus [" + fmt(lo) + ", " + fmt(hi) + "]");
    v.check(flux <= 5e-3, "mu 1e-1 mean|flux| " + fmt(flux));
    v.check(r.seconds < 600.0 || opt.full, "time " + fmt(r.seconds) + "s");
    shared.fig3 = std::move(r);
  }
  {
    Run r = simulate(phase_cell(1e-3, opt.full), opt, "c6_mu1e-3");
    shared.drifts.emplace_back("c6/mu1e-3", r.result.max_mass_drift);
    const double rel = lookup(r.summary, "flux_rel_std");
    const double mean = std::abs(lookup(r.summary, "flux_mean"));
    v.check(rel <= 0.2, "mu 1e-3 flux rel std " + fmt(rel));
    v.check(mean >= 1e-3, "mu 1e-3 |mean flux| " + fmt(mean));
    v.check(r.seconds < 600.0 || opt.full, "time " + fmt(r.seconds) + "s");
    shared.fig4 = std::move(r);
  }
  return v;
}

Verdict criterion5(const Shared& shared) {
  Verdict v;
  if (shared.drifts.empty()) v.check(false, "no runs from criteria 3, 4, 6");
  for (const auto& [tag, d] : shared.drifts) v.check(d <= 1e-8, tag + " drift " + fmt(d));
  return v;
}

Verdict criterion7(const Shared& shared) {
  Verdict v;
  for (const auto* r : {&shared.fig3, &shared.fig4}) {
    if (!r->has_value()) {
      v.check(false, "criterion 6 run missing");
      continue;
    }
    const std::string tag = (*r)->cfg.mu_bar > 1e-2 ? "mu 1e-1" : "mu 1e-3";
    const double ds = std::abs(lookup((*r)->summary, "bitangency.slope_diff"));
    const double di = std::abs(lookup((*r)->summary, "bitangency.intercept_diff"));
    v.check(ds <= 0.05 && di <= 0.05, tag + " ds " + fmt(ds) + " di " + fmt(di));
  }
  return v;
}

Verdict criterion8(std::vector<std::pair<std::string, WaveProfile>>& profiles) {
  Verdict v;
  const auto t0 = Clock::now();
  const EnergyModel e = EnergyModel::quartic();
  const double eps = 1e-3;
  const CnoidalParams cp = k_from_eps(eps);
  const auto cnoidal = [&](double x) { return cnoidal_profile(cp, x); };
  const MinimizerResult mr = minimize_periodic(e, eps, 1.0, 1.5);
  const PeriodicOrbit orbit = find_periodic_orbit(e, eps, 1.0, 1.5);
  const WaveProfile op = orbit.sample(1024);
  const auto orbit_fn = [&](double x) { return orbit.at(x).value; };
  const double d_mc = translation_distance(mr.profile, cnoidal, 1.0);
  const double d_mo = translation_distance(mr.profile, orbit_fn, 1.0);
  const double d_oc = translation_distance(op, cnoidal, 1.0);
  v.check(d_mc <= 1e-2, "min-cnoidal " + fmt(d_mc));
  v.check(d_mo <= 1e-2, "min-orbit " + fmt(d_mo));
  v.check(d_oc <= 1e-6, "orbit-cnoidal " + fmt(d_oc));
  const double lc = 0.0, lm = mr.profile.lambda, lo = orbit.params().lambda;
  const double dl = std::max({std::abs(lm - lo), std::abs(lm - lc), std::abs(lo - lc)});
  v.check(dl <= 1e-3, "lambda spread " + fmt(dl));
  const double secs = seconds_since(t0);
  v.check(secs < 60.0, "time " + fmt(secs) + "s");
  profiles.emplace_back("minimizer eps 1e-3", mr.profile);
  profiles.emplace_back("orbit eps 1e-3", op);
  return v;
}

Verdict criterion9(const Options& opt) {
  Verdict v;
  const auto pts = lambda_decay(EnergyModel::quartic(), 1e-3, 1.3, {1.0, 2.0, 4.0, 8.0});
  if (!opt.outdir.empty()) {
    std::filesystem::create_directories(opt.outdir);
    std::ofstream out(std::filesystem::path(opt.outdir) / "lambda_decay.csv");
    out << "omega,lambda\n" << std::setprecision(17);
    for (const auto& p : pts) out << p.omega << ',' << p.lambda << '\n';
  }
  bool decreasing = true;
  std::string list;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    list += (i ? ", " : "") + fmt(pts[i].lambda);
    if (i > 0 && !(std::abs(pts[i].lambda) < std::abs(pts[i - 1].lambda))) decreasing = false;
  }
  v.check(decreasing, "|lambda| strictly decreasing: " + list);
  v.check(std::abs(pts.back().lambda) <= std::abs(pts.front().lambda) / 4, "|lambda(8)| <= |lambda(1)|/4");
  return v;
}

Verdict criterion10(const Options& opt, std::vector<std::pair<std::string, WaveProfile>>& profiles) {
  Verdict v;
  const double eps = 1e-3;
  const auto d = kink_limit_check(EnergyModel::quartic(), eps, {2.0, 4.0, 8.0});
  if (!opt.outdir.empty()) {
    std::filesystem::create_directories(opt.outdir);
    std::ofstream out(std::filesystem::path(opt.outdir) / "kink_distance.csv");
    out << "omega,distance\n" << std::setprecision(17);
    for (const auto& p : d) out << p.omega << ',' << p.distance << '\n';
  }
  bool decreasing = true;
  std::string list;
  for (std::size_t i = 0; i < d.size(); ++i) {
    list += (i ? ", " : "") + fmt(d[i].distance);
    if (i > 0 && !(d[i].distance < d[i - 1].distance)) decreasing = false;
  }
  v.check(decreasing, "Linf strictly decreasing: " + list);
  v.check(d.back().distance <= 1e-2, "final " + fmt(d.back().distance));
  const WaveProfile k = kink_profile(EnergyModel::quartic(), eps);
  double worst = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const double ref = 1.5 + 0.5 * std::tanh(k.x[i] / (2.0 * std::sqrt(2.0 * eps)));
    worst = std::max(worst, std::abs(k.rho[i] - ref));
  }
  v.check(worst <= 1e-8, "kink vs tanh " + fmt(worst));
  profiles.emplace_back("kink eps 1e-3", k);
  return v;
}

Verdict criterion11(const Shared& shared) {
  Verdict v;
  // (a) random smooth periodic fields
  std::mt19937_64 rng(20261017);
  std::uniform_real_distribution<double> coef(-0.15, 0.15), phase(0.0, 2 * std::numbers::pi),
      flux(-0.3, 0.3);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(5), ph(5);
    for (int k = 0; k < 5; ++k) {
      a[k] = coef(rng) / (k + 1);
      ph[k] = phase(rng);
    }
    const auto f = [&](double x) {
      double s = 1.5;
      for (int k = 0; k < 5; ++k) s += a[k] * std::sin(2 * std::numbers::pi * (k + 1) * x + ph[k]);
      return s;
    };
    const auto df = [&](double x) {
      double s = 0.0;
      for (int k = 0; k < 5; ++k) {
        s += a[k] * 2 * std::numbers::pi * (k + 1) * std::cos(2 * std::numbers::pi * (k + 1) * x + ph[k]);
      }
      return s;
    };
    const HermiteField rho = sample(f, df, PeriodicGrid(256));
    worst = std::max(worst, std::abs(stationarity_identity(rho, flux(rng), 0.1, 1e-4).boundary));
  }
  v.check(worst <= 1e-10, "(a) max boundary " + fmt(worst));
  // (b)
  if (shared.fig3) {
    const double sup_uc = lookup(shared.fig3->summary, "sup_u_minus_c");
    const double sup_u = lookup(shared.fig3->summary, "umax");
    v.check(sup_uc <= 1e-2 * std::max(1.0, sup_u), "(b) sup|u-c| " + fmt(sup_uc));
  } else {
    v.check(false, "(b) criterion 6 run missing");
  }
  // (c) the m = 0.1 Euler-Korteweg wave fed to the viscous identity
  const double m = 0.1;
  const double eps = 1e-3;
  const EnergyModel e = EnergyModel::quartic(m);
  const PeriodicOrbit orbit = find_periodic_orbit(e, eps, 1.0, 1.5);
  const PeriodicGrid grid(600);
  std::vector<double> val(grid.nx()), der(grid.nx());
  for (int j = 0; j < grid.nx(); ++j) {
    const HermiteSample s = orbit.at(grid.node(j));
    val[j] = s.value;
    der[j] = s.deriv;
  }
  const StationarityIntegrals si =
      stationarity_identity(HermiteField(grid, val, der), m, 0.1, eps, e);
  v.check(m * si.dissipation > 1e-4, "(c) m*dissipation " + fmt(m * si.dissipation) +
                                         " boundary " + fmt(si.boundary));
  return v;
}

Verdict criterion12(const std::vector<std::pair<std::string, WaveProfile>>& profiles) {
  Verdict v;
  const EnergyModel e = EnergyModel::quartic();
  const DoubleWell well(e, bitangent(e));
  for (const auto& [tag, p] : profiles) {
    const double slack = modica_mortola_slack(well, p.eps, p);
    v.check(slack >= -1e-12, tag + " slack " + fmt(slack));
  }
  const MinimizerResult r = minimize_periodic(e, 1e-4, 1.0, 1.5);
  const double slack = modica_mortola_slack(well, 1e-4, r.profile);
  v.check(slack >= -1e-12, "minimizer eps 1e-4 slack " + fmt(slack));
  const double two_sigma = 2.0 * sigma(well);
  const double rel = std::abs(r.scaled_energy - two_sigma) / two_sigma;
  v.check(rel <= 0.2, "scaled energy " + fmt(r.scaled_energy) + " vs 2 sigma " + fmt(two_sigma));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primary acceptance criteria"};
  Options opt;
  std::vector<int> only;
  app.add_flag("--full", opt.full, "Long runs (t = 25 phase separation, t = 1 exact solution)");
  app.add_flag("--strict", opt.strict, "Exit with the number of failed criteria");
  app.add_option("--outdir", opt.outdir, "Write snapshots and series of the flow runs here");
  app.add_option("--only", only, "Criteria to run (default all)");
  CLI11_PARSE(app, argc, argv);
  opt.only.insert(only.begin(), only.end());
  const auto wanted = [&](int n) { return opt.only.empty() || opt.only.count(n) > 0; };

  Shared shared;
  std::vector<std::pair<std::string, WaveProfile>> profiles;
  std::map<int, std::function<Verdict()>> table{
      {1, [] { return criterion1(); }},
      {2, [] { return criterion2(); }},
      {3, [&] { return criterion3(opt, shared); }},
      {4, [&] { return criterion4(opt, shared); }},
      {6, [&] { return criterion6(opt, shared); }},
      {5, [&] { return criterion5(shared); }},
      {7, [&] { return criterion7(shared); }},
      {8, [&] { return criterion8(profiles); }},
      {9, [&] { return criterion9(opt); }},
      {10, [&] { return criterion10(opt, profiles); }},
      {11, [&] { return criterion11(shared); }},
      {12, [&] { return criterion12(profiles); }},
  };
  // 6 feeds 5 and 7, so it runs before them
  const std::vector<int> order{1, 2, 3, 4, 6, 5, 7, 8, 9, 10, 11, 12};
  std::map<int, std::string> lines;
  int failures = 0;
  for (int n : order) {
    if (!wanted(n)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = table.at(n)();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << "criterion " << std::setw(2) << n << ": " << (v.pass ? "PASS" : "FAIL") << "  ";
    for (std::size_t i = 0; i < v.notes.size(); ++i) line << (i ? "; " : "") << v.notes[i];
    line << "  [" << fmt(seconds_since(t0)) << "s]";
    lines[n] = line.str();
    std::cerr << lines[n] << std::endl;
    if (!v.pass) ++failures;
  }
  for (const auto& [n, text] : lines) std::cout << text << '\n';
  std::cout << "failed " << failures << " of " << lines.size() << '\n';
  if (!opt.outdir.empty()) {
    std::filesystem::create_directories(opt.outdir);
    std::ofstream out(std::filesystem::path(opt.outdir) / "acceptance.txt");
    for (const auto& [n, text] : lines) out << text << '\n';
    out << "failed " << failures << " of " << lines.size() << '\n';
  }
  return opt.strict ? failures : 0;
}
