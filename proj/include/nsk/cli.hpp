#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nsk/cip.hpp"
#include "nsk/io.hpp"

namespace nsk {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

inline constexpr const char* kVersion = "0.1.0";

/// Outcome of one simulation written to `outdir`.
struct SimulationOutcome {
  int exit_code = kExitOk;
  std::string error;
  KeyValues summary;  // also written to report.txt
};

/// Run `cfg` and write snapshots, series.csv, report.txt and, last,
/// manifest.txt into `outdir`. Runtime failures keep the partial outputs.
SimulationOutcome simulate_to_directory(const SimConfig& cfg, const std::filesystem::path& outdir,
                                        std::ostream& log);

/// Summary of a finished run: interface, flux, bitangency, mass drift.
KeyValues run_summary(const SimConfig& cfg, const RunResult& result);

/// Entry point of the `nsk` executable.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nsk
