#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "nsk/cip.hpp"
#include "nsk/cli.hpp"
#include "nsk/diagnostics.hpp"
#include "nsk/elliptic.hpp"
#include "nsk/energy.hpp"
#include "nsk/errors.hpp"
#include "nsk/io.hpp"
#include "nsk/twave.hpp"

namespace py = pybind11;
using namespace nsk;

namespace {

py::array_t<double> to_array(std::span<const double> v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict state_dict(const FluidState& s) {
  py::dict d;
  std::vector<double> x(s.grid().nx());
  for (int j = 0; j < s.grid().nx(); ++j) x[j] = s.grid().node(j);
  d["x"] = to_array(x);
  d["rho"] = to_array(s.rho.values());
  d["rho_x"] = to_array(s.rho.derivs());
  d["u"] = to_array(s.u.values());
  d["u_x"] = to_array(s.u.derivs());
  d["t"] = s.t;
  return d;
}

py::dict profile_dict(const WaveProfile& p) {
  py::dict d;
  d["x"] = to_array(p.x);
  d["rho"] = to_array(p.rho);
  d["rho_x"] = to_array(p.rho_x);
  d["u"] = to_array(p.velocity());
  d["omega"] = p.omega;
  d["lambda"] = p.lambda;
  d["m"] = p.m;
  d["c"] = p.c;
  d["eps"] = p.eps;
  return d;
}

SimConfig config_from_dict(const py::dict& d) {
  KeyValues kv;
  for (const auto& [k, v] : d) kv.emplace_back(py::str(k), py::str(v));
  return config_from_key_values(kv);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Periodic NSK / EK simulator and travelling-wave toolkit";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NoBitangentError>(m, "NoBitangentError", PyExc_RuntimeError);
  py::register_exception<NoCnoidalWaveError>(m, "NoCnoidalWaveError", PyExc_ValueError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);

  py::class_<Bitangent>(m, "Bitangent")
      .def_readonly("rho_g", &Bitangent::rho_g)
      .def_readonly("rho_l", &Bitangent::rho_l)
      .def_readonly("slope", &Bitangent::slope)
      .def_readonly("intercept", &Bitangent::intercept);

  m.def("bitangent", [](double mom) { return bitangent(EnergyModel::quartic(mom)); },
        py::arg("m") = 0.0, "Common tangent of the quartic Psi^m");
  m.def("sigma", [](double mom) {
    const EnergyModel e = EnergyModel::quartic(mom);
    return sigma(e, bitangent(e));
  }, py::arg("m") = 0.0);
  m.def("psi_m", [](double rho, double mom) { return psi_m(EnergyModel::quartic(mom), rho); },
        py::arg("rho"), py::arg("m") = 0.0);

  m.def("elliptic_K", &elliptic_K, py::arg("k"));
  m.def("jacobi_sn", &jacobi_sn, py::arg("u"), py::arg("k"));
  m.def("cnoidal_modulus", [](double eps) { return k_from_eps(eps).k; }, py::arg("eps"));
  m.def("cnoidal_profile", [](double eps, py::array_t<double> x) {
    const CnoidalParams p = k_from_eps(eps);
    return py::vectorize([&](double xi) { return cnoidal_profile(p, xi); })(x);
  }, py::arg("eps"), py::arg("x"));

  m.def("simulate", [](const py::dict& config) {
    const SimConfig cfg = config_from_dict(config);
    std::optional<RunResult> run_result;
    {
      py::gil_scoped_release release;
      run_result.emplace(run(cfg));
    }
    const RunResult& r = *run_result;
    py::dict out;
    out["state"] = state_dict(r.final_state);
    out["steps"] = r.steps;
    out["max_mass_drift"] = r.max_mass_drift;
    py::dict summary;
    for (const auto& [k, v] : run_summary(cfg, r)) summary[py::str(k)] = v;
    out["summary"] = summary;
    py::dict series;
    series["t"] = to_array(r.series.t);
    series["mass"] = to_array(r.series.mass);
    series["c"] = to_array(r.series.c_smoothed);
    series["flux_mean"] = to_array(r.series.flux_mean);
    out["series"] = series;
    return out;
  }, py::arg("config"), "Run the flow solver; keys as in the config file format");

  m.def("initial_state", [](const py::dict& config) {
    return state_dict(initial_state(config_from_dict(config)));
  }, py::arg("config"));

  m.def("minimize_periodic", [](double eps, double omega, double avg, int n, double tol) {
    MinimizerOptions o;
    o.n = n;
    o.tol = tol;
    const MinimizerResult r = minimize_periodic(EnergyModel::quartic(), eps, omega, avg, o);
    py::dict d = profile_dict(r.profile);
    d["iterations"] = r.iterations;
    d["residual"] = r.residual;
    d["scaled_energy"] = r.scaled_energy;
    return d;
  }, py::arg("eps"), py::arg("omega") = 1.0, py::arg("avg") = 1.5, py::arg("n") = 0,
     py::arg("tol") = 1e-10);

  m.def("periodic_orbit", [](double eps, double omega, double avg, double mom, int n) {
    const PeriodicOrbit o = find_periodic_orbit(EnergyModel::quartic(mom), eps, omega, avg);
    py::dict d = profile_dict(o.sample(n));
    d["H0"] = o.params().H0;
    d["period"] = o.period();
    return d;
  }, py::arg("eps"), py::arg("omega") = 1.0, py::arg("avg") = 1.5, py::arg("m") = 0.0,
     py::arg("n") = 512);

  m.def("kink", [](double eps, double mom, double window, int n) {
    return profile_dict(kink_profile(EnergyModel::quartic(mom), eps, window, n));
  }, py::arg("eps"), py::arg("m") = 0.0, py::arg("window") = 0.0, py::arg("n") = 0);

  m.def("lambda_decay", [](double eps, double avg, const std::vector<double>& omegas) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : lambda_decay(EnergyModel::quartic(), eps, avg, omegas)) {
      out.emplace_back(p.omega, p.lambda);
    }
    return out;
  }, py::arg("eps"), py::arg("avg"), py::arg("omegas"));

  m.def("interface_position", [](py::array_t<double, py::array::c_style | py::array::forcecast> rho,
                                 py::array_t<double, py::array::c_style | py::array::forcecast> rho_x,
                                 double level) {
    const PeriodicGrid g(static_cast<int>(rho.size()));
    const HermiteField f(g, std::vector<double>(rho.data(), rho.data() + rho.size()),
                         std::vector<double>(rho_x.data(), rho_x.data() + rho_x.size()));
    return interface_position(f, level);
  }, py::arg("rho"), py::arg("rho_x"), py::arg("level") = 1.5);

  m.def("main", [](std::vector<std::string> args) {
    args.insert(args.begin(), "nsk");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run the command line; returns (exit code, stdout, stderr)");
}
