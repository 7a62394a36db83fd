#include "nsk/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "nsk/errors.hpp"

namespace nsk {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_plain_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError("key '" + key + "': empty value");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "': not a real number '" + t + "'");
  }
  return v;
}

}  // namespace

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues kv;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    }
    if (!seen.insert(key).second) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    kv.emplace_back(std::move(key), std::move(value));
  }
  return kv;
}

double parse_real(const std::string& text, const std::string& key) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) return parse_plain_real(text, key);
  const double num = parse_plain_real(text.substr(0, slash), key);
  const double den = parse_plain_real(text.substr(slash + 1), key);
  if (den == 0.0) throw ConfigError("key '" + key + "': division by zero");
  return num / den;
}

long parse_integer(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("key '" + key + "': not an integer '" + t + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, const std::string& key) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("key '" + key + "': not a boolean '" + text + "'");
}

SimConfig config_from_key_values(const KeyValues& kv, SimConfig cfg) {
  for (const auto& [key, value] : kv) {
    if (key == "nx") {
      cfg.nx = static_cast<int>(parse_integer(value, key));
    } else if (key == "dt") {
      cfg.dt = parse_real(value, key);
    } else if (key == "t_end") {
      cfg.t_end = parse_real(value, key);
    } else if (key == "eps") {
      cfg.eps = parse_real(value, key);
    } else if (key == "mu_bar") {
      cfg.mu_bar = parse_real(value, key);
    } else if (key == "init") {
      cfg.init.kind = value;
    } else if (key == "init_amplitude") {
      cfg.init.amplitude = parse_real(value, key);
    } else if (key == "ubar") {
      cfg.init.ubar = parse_real(value, key);
    } else if (key == "init_flux") {
      cfg.init.flux = parse_real(value, key);
    } else if (key == "snapshot_every") {
      cfg.snapshot_every = parse_integer(value, key);
    } else if (key == "series_every") {
      cfg.series_every = parse_integer(value, key);
    } else if (key == "cfl_check") {
      cfg.cfl_check = parse_bool(value, key);
    } else if (key == "outdir") {
      cfg.outdir = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (cfg.init.kind != "sine" && cfg.init.kind != "cnoidal" && cfg.init.kind != "constant") {
    throw ConfigError("init must be sine, cnoidal or constant, got '" + cfg.init.kind + "'");
  }
  if (cfg.snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
  if (cfg.series_every < 1) throw ConfigError("series_every must be >= 1");
  if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be >= 0");
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  return config_from_key_values(parse_key_values(in, path.string()));
}

std::string format_real(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

KeyValues config_echo(const SimConfig& cfg) {
  return {
      {"nx", std::to_string(cfg.nx)},
      {"dt", format_real(cfg.dt)},
      {"t_end", format_real(cfg.t_end)},
      {"eps", format_real(cfg.eps)},
      {"mu_bar", format_real(cfg.mu_bar)},
      {"init", cfg.init.kind},
      {"init_amplitude", format_real(cfg.init.amplitude)},
      {"ubar", format_real(cfg.init.ubar)},
      {"init_flux", format_real(cfg.init.flux)},
      {"snapshot_every", std::to_string(cfg.snapshot_every)},
      {"series_every", std::to_string(cfg.series_every)},
      {"cfl_check", cfg.cfl_check ? "true" : "false"},
      {"outdir", cfg.outdir},
  };
}

void write_snapshot(std::ostream& out, const FluidState& state) {
  out << "x,rho,rho_x,u,u_x\n" << std::setprecision(17);
  const auto& g = state.grid();
  for (int j = 0; j < g.nx(); ++j) {
    out << g.node(j) << ',' << state.rho.values()[j] << ',' << state.rho.derivs()[j] << ','
        << state.u.values()[j] << ',' << state.u.derivs()[j] << '\n';
  }
}

FluidState read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("snapshot: empty input");
  if (trim(line) != "x,rho,rho_x,u,u_x") {
    throw ConfigError("snapshot: expected header x,rho,rho_x,u,u_x");
  }
  std::vector<double> cols[5];
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    int k = 0;
    while (std::getline(row, cell, ',')) {
      if (k >= 5) throw ConfigError("snapshot: too many columns in '" + line + "'");
      cols[k++].push_back(parse_plain_real(cell, "snapshot"));
    }
    if (k != 5) throw ConfigError("snapshot: malformed row '" + line + "'");
  }
  if (cols[0].size() < 8) throw ConfigError("snapshot: fewer than 8 rows");
  const int nx = static_cast<int>(cols[0].size());
  const PeriodicGrid grid(nx);
  for (int j = 0; j < nx; ++j) {
    if (std::abs(cols[0][j] - grid.node(j)) > 1e-9) {
      throw ConfigError("snapshot: x column is not the uniform grid j/nx");
    }
  }
  return FluidState{HermiteField(grid, cols[1], cols[2]), HermiteField(grid, cols[3], cols[4]),
                    0.0};
}

std::string snapshot_name(long step) {
  std::ostringstream s;
  s << "snap_" << std::setw(6) << std::setfill('0') << step << ".csv";
  return s.str();
}

void write_profile_csv(std::ostream& out, const WaveProfile& p) {
  out << std::setprecision(17);
  out << "# omega=" << p.omega << ", lambda=" << p.lambda << ", m=" << p.m << ", c=" << p.c
      << '\n';
  out << "x,rho,u\n";
  const std::vector<double> u = p.velocity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    out << p.x[i] << ',' << p.rho[i] << ',' << u[i] << '\n';
  }
}

void write_key_values(std::ostream& out, const KeyValues& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

Manifest::Manifest(std::filesystem::path outdir) : outdir_(std::move(outdir)) {}

void Manifest::add(const std::filesystem::path& file) {
  files_.push_back(std::filesystem::relative(file, outdir_).generic_string());
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

std::filesystem::path Manifest::write() const {
  const auto path = outdir_ / "manifest.txt";
  std::ofstream out(path);
  write_key_values(out, entries_);
  int count = 0;
  for (const auto& f : files_) {
    if (std::filesystem::exists(outdir_ / f)) {
      out << "file." << count++ << '=' << f << '\n';
    }
  }
  out << "file_count=" << count << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return path;
}

}  // namespace nsk
