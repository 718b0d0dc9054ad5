#pragma once

// `corrfolio synth|study|backtest` entry point.

#include "corrfolio/backtest.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace corrfolio {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitConfig = 4;

struct RunConfig {
  std::filesystem::path prices;
  std::filesystem::path fundamentals;
  std::filesystem::path benchmarks;
  std::filesystem::path riskfree;
  std::filesystem::path synth_config;
  std::optional<Date> from;
  std::optional<Date> to;
  std::string strategies;  // comma-separated; empty = all
  std::string fields;      // comma-separated; empty = command default
  std::string adaptive = "auto";
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  bool weights = false;
};

/// Flat `key = value` file; keys are the long flag names without dashes.
/// Lines starting with '#' are comments.
RunConfig parse_run_config(const std::string& text, RunConfig base = {});

/// Loads the panel from files or from the synthetic generator.
PanelData load_run_panel(const RunConfig& config);

void cmd_synth(const RunConfig& config);
void cmd_study(const RunConfig& config);
void cmd_backtest(const RunConfig& config);

/// Parses arguments, runs a command and maps errors to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace corrfolio
