#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "procbench/cli/commands.hpp"
#include "procbench/util/errors.hpp"

namespace {

constexpr const char* kOutEnv = "PROCBENCH_OUT";

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "benchmark config (JSON)");
  if (needs_config) opt->required();
  cmd->add_option("--seed", c.seed, "master seed, overrides plan.master_seed");
  cmd->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory");
}

// --out beats the environment, which beats the config file.
std::filesystem::path output_dir(const Common& c, const std::filesystem::path& from_config) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv(kOutEnv); env && *env) return env;
  return from_config;
}

procbench::BenchmarkConfig load(const Common& c) {
  auto cfg = procbench::load_config(c.config);
  if (c.seed) cfg.plan.master_seed = *c.seed;
  if (c.workers) cfg.workers = *c.workers;
  cfg.output_dir = output_dir(c, cfg.output_dir);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Next-event prediction benchmark for event logs"};
  app.require_subcommand(1);
  bool verbose = false;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbose, "debug logging");
  app.add_flag("-q,--quiet", quiet, "errors only");

  Common common;

  auto* profile = app.add_subcommand("profile", "variability profile of every configured log");
  add_common(profile, common, true);

  auto* encode = app.add_subcommand("encode", "export the window encoding of one log");
  add_common(encode, common, true);
  std::string dataset;
  std::size_t window = 3;
  encode->add_option("--dataset", dataset, "dataset name from the config")->required();
  encode->add_option("-l,--window", window, "window size")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "run the benchmark grid");
  add_common(bench, common, true);

  auto* stats = app.add_subcommand("stats", "Friedman test, posthoc and Rom adjustment");
  add_common(stats, common, false);
  procbench::StatsOptions sopt;
  std::string runs_path;
  std::string groups_path;
  stats->add_option("--runs", runs_path, "runs.csv written by bench")->required();
  stats->add_option("--groups", groups_path, "datasets.csv with a level per dataset");
  stats->add_option("--group", sopt.group, "Low, High or all");
  stats->add_option("--scheme", sopt.scheme, "scheme name or all");
  stats->add_option("--alpha", sopt.alpha, "significance level")->check(CLI::Range(0.0, 1.0));

  auto* report = app.add_subcommand("report", "relative differences against a baseline window");
  add_common(report, common, false);
  procbench::ReportOptions ropt;
  std::string report_runs;
  std::optional<std::size_t> baseline;
  report->add_option("--runs", report_runs, "runs.csv written by bench")->required();
  report->add_option("--scheme", ropt.scheme, "scheme name or all");
  report->add_option("--bases", ropt.bases, "classifiers to report (default: best two by rank)")->delimiter(',');
  report->add_option("--baseline", baseline, "baseline window size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? procbench::kExitOk : procbench::kExitConfig;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("procbench"));
  spdlog::set_level(quiet ? spdlog::level::err : verbose ? spdlog::level::debug : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    if (*profile) return procbench::cmd_profile(load(common), std::cout);
    if (*encode) return procbench::cmd_encode(load(common), dataset, window, std::cout);
    if (*bench) return procbench::cmd_bench(load(common), std::cout);
    // stats and report take their inputs from files; a config only contributes its output dir.
    std::filesystem::path from_config = ".";
    if (!common.config.empty()) from_config = load(common).output_dir;
    if (*stats) {
      sopt.runs = runs_path;
      if (!groups_path.empty()) sopt.groups = groups_path;
      sopt.output_dir = output_dir(common, from_config);
      return procbench::cmd_stats(sopt, std::cout);
    }
    ropt.runs = report_runs;
    ropt.baseline = baseline;
    ropt.output_dir = output_dir(common, from_config);
    return procbench::cmd_report(ropt, std::cout);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return procbench::exit_code_for(e);
  }
}
