#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nsk/cli.hpp"

using namespace nsk;

namespace {

int invoke(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "nsk");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  return code;
}

std::filesystem::path scratch(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("no subcommand is a usage error") { CHECK(invoke({}) == kExitConfig); }

TEST_CASE("dry run writes nothing") {
  const auto d = scratch("nsk_cli_dry");
  std::ofstream(d / "run.cfg") << "nx = 32\ndt = 1e-4\nt_end = 1e-3\n";
  std::string text;
  CHECK(invoke({"simulate", (d / "run.cfg").string(), "--outdir", (d / "out").string(), "--dry-run"}, &text) == kExitOk);
  CHECK(text.find("steps") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(d / "out"));
  std::filesystem::remove_all(d);
}

TEST_CASE("simulate writes a manifest") {
  const auto d = scratch("nsk_cli_sim");
  std::ofstream(d / "run.cfg") << "nx = 32\ndt = 1e-4\nt_end = 1e-3\neps = 1e-3\n";
  CHECK(invoke({"simulate", (d / "run.cfg").string(), "--outdir", (d / "out").string()}) == kExitOk);
  CHECK(std::filesystem::exists(d / "out" / "manifest.txt"));
  CHECK(std::filesystem::exists(d / "out" / "series.csv"));
  std::filesystem::remove_all(d);
}

TEST_CASE("bad inputs exit with the config code") {
  const auto d = scratch("nsk_cli_bad");
  std::ofstream(d / "bad.cfg") << "nx = 32\nwhatever = 1\n";
  CHECK(invoke({"simulate", (d / "bad.cfg").string(), "--outdir", (d / "out").string()}) == kExitConfig);
  CHECK(invoke({"simulate", (d / "none.cfg").string()}) == kExitConfig);
  std::ofstream(d / "bad.csv") << "x,rho\n1,2\n";
  CHECK(invoke({"diagnose", (d / "bad.csv").string()}) == kExitConfig);
  CHECK(invoke({"exact", "--eps", "0.01", "--outdir", (d / "ex").string()}) == kExitConfig);
  std::filesystem::remove_all(d);
}

TEST_CASE("twave kink") {
  const auto d = scratch("nsk_cli_tw");
  CHECK(invoke({"twave", "--method", "kink", "--eps", "1e-3", "--outdir", d.string()}) == kExitOk);
  CHECK(std::filesystem::exists(d / "profile.csv"));
  std::filesystem::remove_all(d);
}
