#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace effeq::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericError = 3 };

/// SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_sha1(std::string_view content);
/// Plain SHA-1 hex digest.
std::string sha1_hex(std::string_view content);

/// An input whose content hash goes into the manifest.
struct InputRecord {
  std::string name;
  std::string content;
};

/// Executes one subcommand and writes its artifacts plus manifest.json into
/// config.out. The manifest is written on failure too. Returns an ExitCode.
int run(const RunConfig& config, const std::vector<InputRecord>& inputs, std::ostream& log);

/// Aggregates the artifacts found in `dir` into plot-ready tables
/// (scan_table.csv, action_summary.csv, spectrum_table.csv).
int report(const std::filesystem::path& dir, std::ostream& log);

/// Command-line entry point: `effeq <subcommand> [--config PATH] [--seed U64]
/// [--workers N] [--out DIR]`, `effeq report DIR`. Flags override EFFEQ_SEED,
/// EFFEQ_WORKERS, EFFEQ_OUT and EFFEQ_CONFIG, which override the config file.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace effeq::cli
