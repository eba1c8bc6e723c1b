#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minesim/config.hpp"
#include "minesim/report.hpp"
#include "minesim/simulation.hpp"

namespace minesim::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kRuntimeError = 2 };

// Thrown for bad flags or arguments; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inclusive tick range parsed from "A..B".
struct FrameRange {
  std::size_t first{0};
  std::size_t last{0};
};
FrameRange parse_frame_range(const std::string& text);

std::string run_id(std::string_view policy, std::uint64_t seed);

// Level from MINESIM_LOG_LEVEL (trace, debug, info, warn, error, critical, off);
// info when unset.
spdlog::level::level_enum log_level_from_env();

// One simulation with its artifacts written under `dir`.
SimResult run_to_directory(const MineConfig& config, const std::string& policy,
                           std::uint64_t seed, double duration, const std::filesystem::path& dir,
                           std::optional<FrameRange> frames);

struct CompareOptions {
  std::vector<std::string> policies;
  std::vector<std::uint64_t> seeds;
  double duration{240.0};
  unsigned threads{0};  // 0 = hardware concurrency
};

// Runs every (policy, seed) cell, possibly in parallel. Results come back in
// policy-major order regardless of scheduling.
std::vector<SimResult> run_grid(const MineConfig& config, const CompareOptions& options);

// Writes summary.csv/md, per_seed.csv/md, curve CSVs and SVG charts.
kpi::ComparisonReport write_comparison(const std::vector<SimResult>& runs, double duration,
                                       const std::filesystem::path& dir);

// Renders ticks [range] of an archive to `dir`; returns the number of frames.
std::size_t visualize(const std::filesystem::path& ticks, const MineConfig& config,
                      std::optional<FrameRange> range, const std::filesystem::path& dir);

// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace minesim::cli
