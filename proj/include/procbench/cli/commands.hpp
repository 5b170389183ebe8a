#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "procbench/cli/config.hpp"
#include "procbench/evaluation/evaluation.hpp"

namespace procbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRuntime = 3;

// Maps the error taxonomy onto process exit codes.
int exit_code_for(const std::exception& e);

// Writes profile.csv to the output dir and a markdown table to out. Logs that fail to parse
// are reported by name and give exit code 2; the remaining logs are still profiled.
int cmd_profile(const BenchmarkConfig& cfg, std::ostream& out);

// Writes <output_dir>/encoded/<dataset>_l<l>.csv plus the code map; prints the sample count.
int cmd_encode(const BenchmarkConfig& cfg, const std::string& dataset, std::size_t window, std::ostream& out);

// Runs the full grid. Files: runs.csv, means.csv, skipped.csv, datasets.csv and
// tables/<scheme>.md. Exit 3 when a task hit an internal failure.
int cmd_bench(const BenchmarkConfig& cfg, std::ostream& out);

struct StatsOptions {
  std::filesystem::path runs;
  std::optional<std::filesystem::path> groups;  // datasets.csv; defaults to the file next to runs
  std::string group = "all";                    // a level name or "all" (each level separately)
  std::string scheme = "all";
  double alpha = 0.05;
  std::filesystem::path output_dir;
};
int cmd_stats(const StatsOptions& opt, std::ostream& out);

struct ReportOptions {
  std::filesystem::path runs;
  std::string scheme = "all";
  std::vector<std::string> bases;  // empty: the two best by average rank per scheme
  std::optional<std::size_t> baseline;  // default: smallest window present
  std::filesystem::path output_dir;
};
// Relative differences of each window against the baseline window.
int cmd_report(const ReportOptions& opt, std::ostream& out);

// Group of each dataset as written by cmd_bench (dataset -> level name).
std::map<std::string, std::string> read_groups_csv(const std::filesystem::path& path);

// Markers for the three best entries: bold, underline, italic. Higher is better unless
// lower_is_better; ties share a marker.
std::vector<int> podium(const std::vector<std::optional<double>>& values, bool lower_is_better);
std::string decorate(const std::string& text, int place);

}  // namespace procbench
