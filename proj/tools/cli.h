#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace fairaudit::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kNumerical = 4,
};

struct Options {
  std::optional<std::filesystem::path> config;
  std::optional<std::filesystem::path> in;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> threads;
  std::string format = "json";
  // build
  bool sample_bias = false;
  bool label_bias = false;
  // rank
  std::string metric = "all";
};

// Each command writes human-readable output to `out` and diagnostics to
// `err`, and returns an ExitCode. No file is created unless the command
// succeeds up to the point of writing.
int CmdGenerate(const Options& o, std::ostream& out, std::ostream& err);
int CmdBuild(const Options& o, std::ostream& out, std::ostream& err);
int CmdAudit(const Options& o, std::ostream& out, std::ostream& err);
int CmdExperiment(const Options& o, std::ostream& out, std::ostream& err);
int CmdRank(const Options& o, std::ostream& out, std::ostream& err);

// Full argv entry point: `fairaudit <subcommand> [flags]`.
int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace fairaudit::cli
