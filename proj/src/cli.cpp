#include "nsk/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "nsk/elliptic.hpp"
#include "nsk/errors.hpp"

namespace nsk {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const KeyValues& kv) {
  std::ofstream out(path);
  write_key_values(out, kv);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

void print_cfl(std::ostream& out, const CflBounds& b, double dt) {
  out << "cfl.advective=" << format_real(b.advective) << '\n'
      << "cfl.dispersive=" << format_real(b.dispersive) << '\n'
      << "cfl.viscous=" << format_real(b.viscous) << '\n'
      << "cfl.limit=" << format_real(b.limit) << '\n'
      << "dt=" << format_real(dt) << '\n'
      << "cfl.ok=" << (b.ok(dt) ? "true" : "false") << '\n';
}

KeyValues state_report(const FluidState& state, const EnergyModel& energy, double c,
                       std::optional<double> m_est) {
  KeyValues kv;
  const auto x = interface_position(state.rho, interface_level(energy));
  kv.emplace_back("interface", x ? format_real(*x) : "none");
  const std::vector<double> flux = mass_flux(state, c);
  const FluxStats fs_ = flux_stats(flux);
  double mean_abs = 0.0;
  for (double f : flux) mean_abs += std::abs(f);
  mean_abs /= static_cast<double>(flux.size());
  const auto u = state.u.values();
  double sup_u = 0.0;
  double sup_uc = 0.0;
  for (double v : u) {
    sup_u = std::max(sup_u, std::abs(v));
    sup_uc = std::max(sup_uc, std::abs(v - c));
  }
  const auto r = state.rho.values();
  const auto [rlo, rhi] = std::minmax_element(r.begin(), r.end());
  kv.emplace_back("c", format_real(c));
  kv.emplace_back("flux_mean", format_real(fs_.mean));
  kv.emplace_back("flux_std", format_real(fs_.std));
  kv.emplace_back("flux_min", format_real(fs_.min));
  kv.emplace_back("flux_max", format_real(fs_.max));
  kv.emplace_back("flux_rel_std",
                  format_real(fs_.mean != 0.0 ? fs_.std / std::abs(fs_.mean) : kNaN));
  kv.emplace_back("flux_mean_abs", format_real(mean_abs));
  kv.emplace_back("rhomin", format_real(*rlo));
  kv.emplace_back("rhomax", format_real(*rhi));
  kv.emplace_back("umax", format_real(sup_u));
  kv.emplace_back("sup_u_minus_c", format_real(sup_uc));
  const double m = m_est.value_or(fs_.mean);
  try {
    const BitangencyReport b = bitangency_check(state, energy, m);
    kv.emplace_back("bitangency.m_est", format_real(b.m_est));
    kv.emplace_back("bitangency.slope_min", format_real(b.at_min.slope));
    kv.emplace_back("bitangency.intercept_min", format_real(b.at_min.intercept));
    kv.emplace_back("bitangency.slope_max", format_real(b.at_max.slope));
    kv.emplace_back("bitangency.intercept_max", format_real(b.at_max.intercept));
    kv.emplace_back("bitangency.slope_diff", format_real(b.slope_diff));
    kv.emplace_back("bitangency.intercept_diff", format_real(b.intercept_diff));
  } catch (const std::exception& e) {
    kv.emplace_back("bitangency.error", e.what());
  }
  return kv;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

KeyValues run_summary(const SimConfig& cfg, const RunResult& result) {
  const DiagnosticSeries& s = result.series;
  KeyValues kv;
  kv.emplace_back("steps", std::to_string(result.steps));
  kv.emplace_back("t_final", format_real(result.final_state.t));
  kv.emplace_back("mass_initial", format_real(result.initial_mass));
  kv.emplace_back("max_mass_drift", format_real(result.max_mass_drift));
  double c = s.trailing_speed(0.1);
  kv.emplace_back("c_trailing", format_real(c));
  if (!std::isfinite(c)) c = 0.0;
  const double m_est = s.trailing_flux(0.1);
  kv.emplace_back("flux_trailing", format_real(m_est));
  for (auto& entry : state_report(result.final_state, cfg.energy, c, m_est)) {
    kv.push_back(std::move(entry));
  }
  if (cfg.init.kind == "cnoidal") {
    const CnoidalParams p = k_from_eps(cfg.eps);
    const auto& g = result.final_state.grid();
    double linf = 0.0;
    for (int j = 0; j < g.nx(); ++j) {
      const FlowPoint e = exact_solution(p, cfg.init.ubar, g.node(j), result.final_state.t);
      linf = std::max(linf, std::abs(result.final_state.rho.values()[j] - e.rho));
    }
    kv.emplace_back("exact.linf_rho", format_real(linf));
    kv.emplace_back("exact.pass", linf <= 2e-2 ? "true" : "false");
  }
  return kv;
}

SimulationOutcome simulate_to_directory(const SimConfig& cfg, const fs::path& outdir,
                                        std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(outdir);
  Manifest manifest(outdir);
  for (const auto& [k, v] : config_echo(cfg)) manifest.set("config." + k, v);
  manifest.set("config.outdir", outdir.generic_string());
  manifest.set("version", kVersion);

  SimulationOutcome outcome;
  long last_snapshot = -1;
  RunObserver observer;
  observer.on_snapshot = [&](long step, const FluidState& st) {
    const fs::path p = outdir / snapshot_name(step);
    std::ofstream out(p);
    write_snapshot(out, st);
    manifest.add(p);
    last_snapshot = step;
  };
  observer.on_warning = [&](const std::string& msg) { log << "warning: " << msg << '\n'; };

  try {
    const RunResult result = run(cfg, observer);
    if (last_snapshot != result.steps) {
      observer.on_snapshot(result.steps, result.final_state);
    }
    const fs::path series = outdir / "series.csv";
    {
      std::ofstream out(series);
      result.series.write_csv(out);
    }
    manifest.add(series);
    outcome.summary = run_summary(cfg, result);
    const fs::path report = outdir / "report.txt";
    write_text(report, outcome.summary);
    manifest.add(report);
    for (const auto& [k, v] : outcome.summary) manifest.set("summary." + k, v);
    manifest.set("status", "ok");
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfig;
    outcome.error = e.what();
  } catch (const SimulationError& e) {
    outcome.exit_code = kExitRuntime;
    outcome.error = e.what();
    manifest.set("failed_step", std::to_string(e.step()));
  } catch (const std::exception& e) {
    outcome.exit_code = kExitRuntime;
    outcome.error = e.what();
  }
  if (outcome.exit_code != kExitOk) {
    manifest.set("status", "failed");
    manifest.set("error", outcome.error);
  }
  manifest.set("wall_seconds", format_real(seconds_since(t0)));
  manifest.write();
  return outcome;
}

namespace {

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

GridAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= spec.size()) {
    throw ConfigError("grid axis must look like key=v1,v2,...: '" + spec + "'");
  }
  GridAxis axis{spec.substr(0, eq), {}};
  std::istringstream rest(spec.substr(eq + 1));
  std::string v;
  while (std::getline(rest, v, ',')) {
    if (v.empty()) throw ConfigError("empty value in grid axis '" + spec + "'");
    axis.values.push_back(v);
  }
  return axis;
}

int cmd_simulate(const std::string& config_path, const std::string& outdir_flag, bool dry_run,
                 std::ostream& out, std::ostream& err) {
  SimConfig cfg;
  try {
    cfg = load_config(config_path);
    if (!outdir_flag.empty()) cfg.outdir = outdir_flag;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (dry_run) {
    try {
      const FluidState s0 = initial_state(cfg);
      out << "steps=" << cfg.num_steps() << '\n';
      print_cfl(out, cfl_bounds(s0, cfg), cfg.dt);
      return kExitOk;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitConfig;
    }
  }
  const SimulationOutcome o = simulate_to_directory(cfg, cfg.outdir, err);
  if (o.exit_code != kExitOk) {
    err << "error: " << o.error << '\n';
    return o.exit_code;
  }
  write_key_values(out, o.summary);
  return kExitOk;
}

struct TwaveFlags {
  std::string method = "minimize";
  double eps = 1e-3;
  double omega = 1.0;
  double avg = 1.5;
  double m = 0.0;
  double u1 = 0.0;
  int n = 0;
  double window = 0.0;
  double tol = 1e-10;
};

int cmd_twave(const TwaveFlags& f, const std::string& outdir, bool dry_run, std::ostream& out,
              std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  KeyValues report;
  WaveProfile profile;
  try {
    const EnergyModel energy = EnergyModel::quartic(f.m);
    const DoubleWell well(energy, bitangent(energy));
    report.emplace_back("method", f.method);
    report.emplace_back("eps", format_real(f.eps));
    report.emplace_back("rho_g", format_real(well.bitangent().rho_g));
    report.emplace_back("rho_l", format_real(well.bitangent().rho_l));
    report.emplace_back("sigma", format_real(sigma(well)));
    if (dry_run) {
      write_key_values(out, report);
      return kExitOk;
    }
    if (f.method == "minimize") {
      MinimizerOptions opts;
      opts.n = f.n;
      opts.tol = f.tol;
      const MinimizerResult r = minimize_periodic(energy, f.eps, f.omega, f.avg, opts);
      profile = r.profile;
      report.emplace_back("iterations", std::to_string(r.iterations));
      report.emplace_back("residual", format_real(r.residual));
      report.emplace_back("energy", format_real(r.energy));
      report.emplace_back("scaled_energy", format_real(r.scaled_energy));
      for (std::size_t i = 0; i < r.warnings.size(); ++i) {
        report.emplace_back("warning." + std::to_string(i), r.warnings[i]);
        err << "warning: " << r.warnings[i] << '\n';
      }
    } else if (f.method == "orbit") {
      OrbitSolveOptions opts;
      opts.n = f.n;
      const PeriodicOrbit orbit = find_periodic_orbit(energy, f.eps, f.omega, f.avg, opts);
      profile = orbit.sample(f.n > 0 ? f.n : std::max(256, static_cast<int>(std::ceil(
                                                             20.0 * f.omega / std::sqrt(f.eps)))));
      double h_dev = 0.0;
      for (std::size_t i = 0; i < profile.size(); ++i) {
        h_dev = std::max(h_dev, std::abs(orbit.hamiltonian(profile.rho[i], profile.rho_x[i]) -
                                         orbit.params().H0));
      }
      report.emplace_back("period", format_real(orbit.period()));
      report.emplace_back("H0", format_real(orbit.params().H0));
      report.emplace_back("q_minus", format_real(orbit.params().q_minus));
      report.emplace_back("q_plus", format_real(orbit.params().q_plus));
      report.emplace_back("hamiltonian_deviation", format_real(h_dev));
    } else if (f.method == "kink") {
      profile = kink_profile(energy, f.eps, f.window, f.n);
    } else {
      err << "error: unknown method '" << f.method << "'\n";
      return kExitConfig;
    }
    report.emplace_back("omega", format_real(profile.omega));
    report.emplace_back("lambda", format_real(profile.lambda));
    report.emplace_back("average", format_real(profile.average));
    report.emplace_back("points", std::to_string(profile.size()));
    report.emplace_back("mm_slack", format_real(modica_mortola_slack(well, f.eps, profile)));
    const TravelingWave wave = galilean_assemble(profile, f.m, f.u1);
    profile = wave.profile;
    report.emplace_back("m", format_real(wave.m));
    report.emplace_back("c", format_real(wave.c));
    report.emplace_back("u1", format_real(wave.u1));
    report.emplace_back("u2", format_real(wave.u2));
    report.emplace_back("phase_transition", wave.phase_transition ? "true" : "false");
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (residual " << format_real(e.residual()) << ")\n";
    return kExitRuntime;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NoBitangentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  fs::create_directories(outdir);
  Manifest manifest(outdir);
  manifest.set("version", kVersion);
  manifest.set("command", "twave");
  const fs::path csv = fs::path(outdir) / "profile.csv";
  {
    std::ofstream o(csv);
    write_profile_csv(o, profile);
  }
  manifest.add(csv);
  const fs::path rep = fs::path(outdir) / "twave_report.txt";
  write_text(rep, report);
  manifest.add(rep);
  for (const auto& [k, v] : report) manifest.set("summary." + k, v);
  manifest.set("wall_seconds", format_real(seconds_since(t0)));
  manifest.write();
  write_key_values(out, report);
  return kExitOk;
}

int cmd_exact(double eps, double ubar, double t, int nx, bool pi_scaled, const std::string& outdir,
              bool dry_run, std::ostream& out, std::ostream& err) {
  CnoidalParams p;
  try {
    if (nx < 8) throw ConfigError("nx must be >= 8");
    p = k_from_eps(eps);
    p.pi_scaled_argument = pi_scaled;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  KeyValues report{{"eps", format_real(eps)},
                   {"k", format_real(p.k)},
                   {"K", format_real(p.K)},
                   {"amplitude", format_real(p.amplitude)},
                   {"ubar", format_real(ubar)},
                   {"t", format_real(t)},
                   {"nx", std::to_string(nx)},
                   {"pi_scaled_argument", pi_scaled ? "true" : "false"}};
  if (dry_run) {
    write_key_values(out, report);
    return kExitOk;
  }
  const PeriodicGrid grid(nx);
  std::vector<double> r(nx), rx(nx), u(nx, ubar), ux(nx, 0.0);
  for (int j = 0; j < nx; ++j) {
    const double x = grid.node(j) - ubar * t;
    r[j] = cnoidal_profile(p, x);
    rx[j] = cnoidal_slope(p, x);
  }
  const FluidState s{HermiteField(grid, r, rx), HermiteField(grid, u, ux), t};
  fs::create_directories(outdir);
  Manifest manifest(outdir);
  manifest.set("version", kVersion);
  manifest.set("command", "exact");
  const fs::path csv = fs::path(outdir) / "exact.csv";
  {
    std::ofstream o(csv);
    write_snapshot(o, s);
  }
  manifest.add(csv);
  const fs::path rep = fs::path(outdir) / "exact_report.txt";
  write_text(rep, report);
  manifest.add(rep);
  manifest.write();
  write_key_values(out, report);
  return kExitOk;
}

struct DiagnoseFlags {
  std::string snapshot;
  std::optional<double> c;
  std::optional<double> m_est;
  double eps = 1e-4;
  double mu_bar = 0.1;
};

int cmd_diagnose(const DiagnoseFlags& f, const std::string& outdir, std::ostream& out,
                 std::ostream& err) {
  FluidState state{HermiteField(PeriodicGrid(8)), HermiteField(PeriodicGrid(8)), 0.0};
  try {
    std::ifstream in(f.snapshot);
    if (!in) throw ConfigError("cannot read snapshot '" + f.snapshot + "'");
    state = read_snapshot(in);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  const EnergyModel energy = EnergyModel::quartic();
  KeyValues report;
  report.emplace_back("snapshot", f.snapshot);
  report.emplace_back("nx", std::to_string(state.grid().nx()));
  report.emplace_back("mass", format_real(state.rho.integral()));
  for (auto& e : state_report(state, energy, f.c.value_or(0.0), f.m_est)) {
    report.push_back(std::move(e));
  }
  try {
    const double m = f.m_est.value_or(FluxMoments::of(state).flux_mean(f.c.value_or(0.0)));
    const StationarityIntegrals si = stationarity_identity(state.rho, m, f.mu_bar, f.eps);
    report.emplace_back("stationarity.m", format_real(m));
    report.emplace_back("stationarity.boundary", format_real(si.boundary));
    report.emplace_back("stationarity.dissipation", format_real(si.dissipation));
  } catch (const std::exception& e) {
    report.emplace_back("stationarity.error", e.what());
  }
  write_key_values(out, report);
  if (!outdir.empty()) {
    fs::create_directories(outdir);
    Manifest manifest(outdir);
    manifest.set("version", kVersion);
    manifest.set("command", "diagnose");
    const fs::path rep = fs::path(outdir) / "diagnose.txt";
    write_text(rep, report);
    manifest.add(rep);
    manifest.write();
  }
  return kExitOk;
}

int cmd_sweep(const std::string& template_path, const std::vector<std::string>& axes_spec,
              const std::string& outdir, int jobs, bool dry_run, std::ostream& out,
              std::ostream& err) {
  KeyValues base;
  std::vector<GridAxis> axes;
  try {
    std::ifstream in(template_path);
    if (!in) throw ConfigError("cannot read config '" + template_path + "'");
    base = parse_key_values(in, template_path);
    for (const auto& a : axes_spec) axes.push_back(parse_axis(a));
    if (axes.empty()) throw ConfigError("sweep needs at least one --grid axis");
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::size_t cells = 1;
  for (const auto& a : axes) cells *= a.values.size();
  struct Cell {
    KeyValues overrides;
    fs::path dir;
    SimConfig cfg;
    bool valid = false;
    SimulationOutcome outcome;
    std::string log;
  };
  std::vector<Cell> grid(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    std::size_t rest = i;
    for (auto a = axes.rbegin(); a != axes.rend(); ++a) {
      grid[i].overrides.insert(grid[i].overrides.begin(),
                               {a->key, a->values[rest % a->values.size()]});
      rest /= a->values.size();
    }
    std::ostringstream name;
    name << "cell_" << std::setw(3) << std::setfill('0') << i;
    grid[i].dir = fs::path(outdir) / name.str();
    KeyValues kv;
    for (const auto& [k, v] : base) {
      const bool overridden = std::any_of(grid[i].overrides.begin(), grid[i].overrides.end(),
                                          [&](const auto& o) { return o.first == k; });
      if (!overridden && k != "outdir") kv.emplace_back(k, v);
    }
    for (const auto& o : grid[i].overrides) kv.push_back(o);
    try {
      grid[i].cfg = config_from_key_values(kv);
      grid[i].cfg.outdir = grid[i].dir.generic_string();
      grid[i].valid = true;
    } catch (const ConfigError& e) {
      grid[i].outcome.exit_code = kExitConfig;
      grid[i].outcome.error = e.what();
    }
  }

  if (dry_run) {
    for (std::size_t i = 0; i < cells; ++i) {
      out << "cell " << i << ':';
      for (const auto& [k, v] : grid[i].overrides) out << ' ' << k << '=' << v;
      out << '\n';
      if (!grid[i].valid) {
        out << "error=" << grid[i].outcome.error << '\n';
        continue;
      }
      print_cfl(out, cfl_bounds(initial_state(grid[i].cfg), grid[i].cfg), grid[i].cfg.dt);
    }
    return kExitOk;
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      if (!grid[i].valid) continue;
      std::ostringstream log;
      grid[i].outcome = simulate_to_directory(grid[i].cfg, grid[i].dir, log);
      grid[i].log = log.str();
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(cells)));
  std::vector<std::thread> pool;
  for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  fs::create_directories(outdir);
  Manifest manifest(outdir);
  manifest.set("version", kVersion);
  manifest.set("command", "sweep");
  manifest.set("template", template_path);
  const fs::path summary = fs::path(outdir) / "summary.csv";
  const std::vector<std::string> cols = {"max_mass_drift", "c_trailing",     "flux_trailing",
                                         "flux_mean",      "flux_rel_std",   "flux_mean_abs",
                                         "rhomin",         "rhomax",         "sup_u_minus_c",
                                         "bitangency.slope_diff", "bitangency.intercept_diff"};
  int failures = 0;
  {
    std::ofstream o(summary);
    std::vector<std::string> header{"cell"};
    for (const auto& a : axes) header.push_back(a.key);
    header.push_back("status");
    header.push_back("exit_code");
    header.insert(header.end(), cols.begin(), cols.end());
    header.push_back("error");
    o << join(header, ",") << '\n';
    for (std::size_t i = 0; i < cells; ++i) {
      const Cell& c = grid[i];
      std::vector<std::string> row{c.dir.filename().string()};
      for (const auto& ov : c.overrides) row.push_back(ov.second);
      const bool ok = c.outcome.exit_code == kExitOk;
      if (!ok) ++failures;
      row.push_back(ok ? "ok" : "failed");
      row.push_back(std::to_string(c.outcome.exit_code));
      for (const auto& col : cols) {
        std::string v;
        for (const auto& [k, val] : c.outcome.summary) {
          if (k == col) v = val;
        }
        row.push_back(v);
      }
      std::string e = c.outcome.error;
      std::replace(e.begin(), e.end(), ',', ';');
      std::replace(e.begin(), e.end(), '\n', ' ');
      row.push_back(e);
      o << join(row, ",") << '\n';
      if (!c.log.empty()) err << c.dir.filename().string() << ": " << c.log;
      if (!ok) err << c.dir.filename().string() << ": error: " << c.outcome.error << '\n';
      const fs::path cell_manifest = c.dir / "manifest.txt";
      if (fs::exists(cell_manifest)) manifest.add(cell_manifest);
    }
  }
  manifest.add(summary);
  manifest.set("cells", std::to_string(cells));
  manifest.set("failures", std::to_string(failures));
  manifest.set("wall_seconds", format_real(seconds_since(t0)));
  manifest.write();
  out << "cells=" << cells << "\nfailures=" << failures << "\nsummary=" << summary.string()
      << '\n';
  return failures == static_cast<int>(cells) ? kExitRuntime : kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Periodic Navier-Stokes-Korteweg / Euler-Korteweg simulator and travelling waves",
               "nsk"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string outdir;
  bool dry_run = false;
  long seed = 0;
  auto common = [&](CLI::App* sub, const std::string& default_outdir) {
    sub->add_option("--outdir", outdir, "Output directory")->default_str(default_outdir);
    sub->add_flag("--dry-run", dry_run, "Validate inputs and report without writing files");
    sub->add_option("--seed", seed, "Reserved; no solver is random");
  };

  std::string config;
  auto* sim = app.add_subcommand("simulate", "Run the flow solver from a config file");
  sim->add_option("config", config, "key=value config file")->required();
  common(sim, "config outdir");

  TwaveFlags tw;
  auto* twave = app.add_subcommand("twave", "Build a travelling-wave profile");
  twave->add_option("--method", tw.method, "minimize | orbit | kink")
      ->check(CLI::IsMember({"minimize", "orbit", "kink"}))
      ->capture_default_str();
  twave->add_option("--eps", tw.eps, "Korteweg parameter")->capture_default_str();
  twave->add_option("--omega", tw.omega, "Period")->capture_default_str();
  twave->add_option("--avg", tw.avg, "Mean density")->capture_default_str();
  twave->add_option("--m", tw.m, "Mass flux")->capture_default_str();
  twave->add_option("--u1", tw.u1, "Vapour-side velocity")->capture_default_str();
  twave->add_option("--n", tw.n, "Sample count (0: automatic)")->capture_default_str();
  twave->add_option("--window", tw.window, "Kink half-window (0: 40 sqrt(eps))");
  twave->add_option("--tol", tw.tol, "Minimiser projected-gradient tolerance")
      ->capture_default_str();
  common(twave, "twave");

  double ex_eps = 1e-4, ex_ubar = 0.0, ex_t = 0.0;
  int ex_nx = 300;
  bool ex_pi = false;
  auto* exact = app.add_subcommand("exact", "Sample the travelling cnoidal solution");
  exact->add_option("--eps", ex_eps)->capture_default_str();
  exact->add_option("--ubar", ex_ubar)->capture_default_str();
  exact->add_option("--t", ex_t)->capture_default_str();
  exact->add_option("--nx", ex_nx)->capture_default_str();
  exact->add_flag("--pi-scaled-argument", ex_pi,
                  "Evaluate sn(4 K x / pi, k), the literal variant, for comparison");
  common(exact, "exact");

  DiagnoseFlags dg;
  double dg_c = 0.0, dg_m = 0.0;
  auto* diag = app.add_subcommand("diagnose", "Diagnostics of a snapshot CSV");
  diag->add_option("snapshot", dg.snapshot)->required();
  auto* c_opt = diag->add_option("--c", dg_c, "Interface speed for the flux (default 0)");
  auto* m_opt = diag->add_option("--m-est", dg_m, "Flux for the bitangency check");
  diag->add_option("--eps", dg.eps)->capture_default_str();
  diag->add_option("--mu-bar", dg.mu_bar)->capture_default_str();
  common(diag, "none");

  std::string sweep_template;
  std::vector<std::string> axes;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid concurrently");
  sweep->add_option("template", sweep_template, "key=value config template")->required();
  sweep->add_option("--grid", axes, "Axis key=v1,v2,... (repeatable)")->required();
  sweep->add_option("--jobs", jobs, "Concurrent cells")->capture_default_str();
  common(sweep, "sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (auto* sub : app.get_subcommands()) {
    if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
      out << sub->help();
      return kExitOk;
    }
  }

  if (sim->parsed()) return cmd_simulate(config, outdir, dry_run, out, err);
  if (twave->parsed()) return cmd_twave(tw, outdir.empty() ? "twave" : outdir, dry_run, out, err);
  if (exact->parsed()) {
    return cmd_exact(ex_eps, ex_ubar, ex_t, ex_nx, ex_pi, outdir.empty() ? "exact" : outdir, dry_run,
                     out, err);
  }
  if (diag->parsed()) {
    if (c_opt->count() > 0) dg.c = dg_c;
    if (m_opt->count() > 0) dg.m_est = dg_m;
    return cmd_diagnose(dg, dry_run ? std::string() : outdir, out, err);
  }
  if (sweep->parsed()) {
    return cmd_sweep(sweep_template, axes, outdir.empty() ? "sweep" : outdir, jobs, dry_run, out,
                     err);
  }
  return kExitConfig;
}

}  // namespace nsk
