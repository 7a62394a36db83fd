#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nsk/cip.hpp"
#include "nsk/state.hpp"
#include "nsk/twave.hpp"

namespace nsk {

/// Ordered key=value pairs, as read from a config or written to a report.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Flat `key = value` text; '#' starts a comment. Duplicate keys and lines
/// without '=' throw ConfigError.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<input>");

/// Reals accept a plain literal or a quotient such as 1/120000.
double parse_real(const std::string& text, const std::string& key);
long parse_integer(const std::string& text, const std::string& key);
bool parse_bool(const std::string& text, const std::string& key);

/// Keys: nx, dt, t_end, eps, mu_bar, init, init_amplitude, ubar, init_flux,
/// snapshot_every, series_every, cfl_check, outdir. Unknown keys throw.
SimConfig config_from_key_values(const KeyValues& kv, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path);
KeyValues config_echo(const SimConfig& cfg);

std::string format_real(double v);

/// Columns x, rho, rho_x, u, u_x.
void write_snapshot(std::ostream& out, const FluidState& state);
FluidState read_snapshot(std::istream& in);
std::string snapshot_name(long step);

/// Columns x, rho, u after a `# omega=..., lambda=..., m=..., c=...` line.
void write_profile_csv(std::ostream& out, const WaveProfile& profile);

void write_key_values(std::ostream& out, const KeyValues& kv);

/// Files written into an output directory; `write` emits manifest.txt last
/// and lists only files that exist.
class Manifest {
 public:
  explicit Manifest(std::filesystem::path outdir);
  void add(const std::filesystem::path& file);
  void set(const std::string& key, const std::string& value);
  std::filesystem::path write() const;
  const std::filesystem::path& outdir() const { return outdir_; }

 private:
  std::filesystem::path outdir_;
  std::vector<std::string> files_;
  KeyValues entries_;
};

}  // namespace nsk
