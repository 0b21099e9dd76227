// Command-line front end. The commands write only through the streams they
// are given and through atomically renamed output files, so they can be
// driven in-process as well as from tools/cvqsdc.cpp.
#pragma once

#include "cvqsdc/config.hpp"
#include "cvqsdc/sweep.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cvqsdc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kAborted = 2,
  kCompareFailed = 3,
};

struct RunSpec {
  std::string command;
  std::optional<std::filesystem::path> config_path;
  std::vector<KeyValue> overrides;  ///< --set, applied after the config file
  std::optional<std::filesystem::path> output_path;
  std::optional<std::uint64_t> seed;
  std::size_t grid = 101;
  bool raw_log = false;
  double tolerance_percent = 5.0;
  std::optional<std::filesystem::path> measurement_path;  ///< compare only
};

/// Settings that shape a sweep rather than a single protocol run. In a
/// config file they use the "sweep." prefix.
struct SweepSettings {
  CurveVariant variant = CurveVariant::asymmetric;
  Provenance mode = Provenance::analytic;
  std::size_t runs = 1;
  unsigned threads = 0;
};

struct Settings {
  ProtocolConfig protocol;
  SweepSettings sweep;
};

/// Defaults, then the config file, then --set overrides, then --seed.
/// Throws std::invalid_argument or std::runtime_error.
Settings load_settings(const RunSpec& spec, const ProtocolConfig& defaults = {});

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_figure3(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_figure4(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_compare(const RunSpec& spec, std::ostream& out, std::ostream& err);

int dispatch(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a temporary file and a rename, so a
/// failed write never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cvqsdc::cli
