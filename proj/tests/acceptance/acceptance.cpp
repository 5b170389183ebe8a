// Acceptance checks. Each prints one "[PASS|FAIL|SKIP] ..." line per criterion part.
// Exit status: 0 all pass, 1 any failure, 77 nothing failed but something was skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "procbench/cli/commands.hpp"
#include "procbench/cli/config.hpp"
#include "procbench/encoding/encoding.hpp"
#include "procbench/evaluation/evaluation.hpp"
#include "procbench/eventlog/variability.hpp"
#include "procbench/stats/distributions.hpp"
#include "procbench/stats/tests.hpp"
#include "procbench/util/csv.hpp"
#include "procbench/util/errors.hpp"
#include "properties.hpp"
#include "stat_oracles.hpp"

using namespace procbench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  bool failed = false;
  bool skipped = false;

  void report(Verdict v, const std::string& line) {
    static const char* tag[] = {"PASS", "FAIL", "SKIP"};
    std::cout << "[" << tag[static_cast<int>(v)] << "] " << line << std::endl;
    failed |= v == Verdict::fail;
    skipped |= v == Verdict::skip;
  }
  int code() const { return failed ? 1 : skipped ? 77 : 0; }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Published reference values per log.
struct LogReference {
  std::string check;   // suffix of the check name
  std::string name;    // dataset name in configs/full_grid.json
  std::vector<std::size_t> samples;  // l = 3..8
  double ratio;
  VariabilityLevel level;
  bool exact;          // sample sizes must match exactly
  const char* unavailable;  // set when the exact published log version is not in data/
};

const std::vector<LogReference>& references() {
  static const std::vector<LogReference> refs{
      {"sepsis", "Sepsis", {12043, 11029, 10016, 9064, 8144, 7251}, 0.75, VariabilityLevel::High, true, nullptr},
      {"bpic2013", "BPIC2013 Incident", {42883, 37101, 32193, 27709, 23964, 20789}, 0.33, VariabilityLevel::High, true,
       nullptr},
      {"bpic2012", "BPIC2012", {6579, 3657, 1911, 952, 444, 197}, 0.40, VariabilityLevel::High, false, nullptr},
      {"helpdesk", "Helpdesk", {2477, 1117, 490, 227, 101, 56}, 0.032, VariabilityLevel::Low, false,
       "only the 4580-case Helpdesk release is available (published figures use the 3804-case version)"},
      {"road_traffic", "Road Traffic", {10042, 5402, 767, 163, 101, 49}, 0.045, VariabilityLevel::Low, false,
       "only a 5000-case Road Traffic sample is available (published figures use a 10000-case sample)"},
      {"hospital_billing", "Hospital Billing", {24337, 17066, 9877, 4936, 3696, 2887}, 0.01, VariabilityLevel::Low,
       true, "the Hospital Billing log is not available in this environment"},
  };
  return refs;
}

const LogReference* find_reference(const std::string& check) {
  for (const auto& r : references()) {
    if (r.check == check) return &r;
  }
  return nullptr;
}

BenchmarkConfig full_config() { return load_config(fs::path(PROCBENCH_CONFIG_DIR) / "full_grid.json"); }

const DatasetConfig* configured(const BenchmarkConfig& cfg, const std::string& name) {
  for (const auto& d : cfg.datasets) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

// ------------------------------------------------------------------ C1

void check_c1(const LogReference& ref, Outcome& o) {
  const std::string label = "C1 " + ref.name;
  std::optional<BenchmarkConfig> cfg;
  const DatasetConfig* ds = nullptr;
  try {
    cfg.emplace(full_config());
    ds = configured(*cfg, ref.name);
  } catch (const DataError&) {
  }
  if (!ds) {
    o.report(Verdict::skip, label + ": " + (ref.unavailable ? ref.unavailable : "log file missing"));
    return;
  }
  const auto t0 = Clock::now();
  const auto log = load_dataset(*ds);
  std::vector<std::size_t> got;
  for (std::size_t l = 3; l <= 8; ++l) got.push_back(encode_log(log, l).samples.size());
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  bool exact = true;
  for (std::size_t i = 0; i < got.size(); ++i) {
    exact &= got[i] == ref.samples[i];
    const double rel = std::abs(static_cast<double>(got[i]) - static_cast<double>(ref.samples[i])) /
                       static_cast<double>(ref.samples[i]);
    worst = std::max(worst, rel);
  }
  const std::string detail =
      fmt::format("{}: l=3..8 samples {} (published {}), max deviation {:.2f}%, {:.1f}s", ref.name, join(got),
                  join(ref.samples), 100 * worst, elapsed);
  if (ref.unavailable) {
    o.report(Verdict::skip, "C1 " + detail + "; " + ref.unavailable);
    return;
  }
  const bool ok = (ref.exact ? exact : worst <= 0.01) && elapsed < 60.0;
  o.report(ok ? Verdict::pass : Verdict::fail,
           "C1 " + detail + (ref.exact ? " [exact match required]" : " [within 1% required]"));
}

// ------------------------------------------------------------------ C2

void check_c2(const LogReference& ref, Outcome& o) {
  std::optional<BenchmarkConfig> cfg;
  const DatasetConfig* ds = nullptr;
  try {
    cfg.emplace(full_config());
    ds = configured(*cfg, ref.name);
  } catch (const DataError&) {
  }
  if (!ds) {
    o.report(Verdict::skip, "C2 " + ref.name + ": " + (ref.unavailable ? ref.unavailable : "log file missing"));
    return;
  }
  const auto p = profile_variability(load_dataset(*ds), cfg->variability_threshold, cfg->coverage_rule);
  const std::string detail = fmt::format("{}: ratio {:.4f} ({}/{} variants, {}), published {} +- 0.005", ref.name,
                                         p.ratio, p.variants_to_80pct, p.num_variants, to_string(p.level), ref.ratio);
  if (ref.unavailable) {
    o.report(Verdict::skip, "C2 " + detail + "; " + ref.unavailable);
    return;
  }
  o.report(std::abs(p.ratio - ref.ratio) <= 0.005 ? Verdict::pass : Verdict::fail, "C2 " + detail);
}

void check_c2_partition(Outcome& o) {
  const auto cfg = full_config();
  std::string detail;
  bool ok = true;
  std::size_t seen = 0;
  std::vector<std::string> missing;
  for (const auto& ref : references()) {
    const auto* ds = configured(cfg, ref.name);
    if (!ds) {
      missing.push_back(ref.name);
      continue;
    }
    const auto p = profile_variability(load_dataset(*ds), cfg.variability_threshold, cfg.coverage_rule);
    ok &= p.level == ref.level;
    ++seen;
    detail += fmt::format("{}{} {} (expected {})", detail.empty() ? "" : ", ", ref.name, to_string(p.level),
                          to_string(ref.level));
  }
  std::string note;
  if (!missing.empty()) note += "; not available:";
  for (const auto& m : missing) note += " " + m;
  note += "; Helpdesk and Road Traffic are the available substitute releases";
  o.report(ok && seen > 0 ? Verdict::pass : Verdict::fail, "C2 Low/High partition: " + detail + note);
}

// ------------------------------------------------------------------ C3

void check_c3(Outcome& o) {
  std::ifstream acc_in(fs::path(PROCBENCH_TEST_DATA) / "published_individual_accuracy.csv");
  const auto means = cell_means(read_runs_csv(acc_in));
  std::ifstream ref_in(fs::path(PROCBENCH_TEST_DATA) / "published_relative_differences_individual.csv");
  csv::Reader reader(ref_in);
  std::vector<std::string> f;
  reader.next(f);  // header
  std::size_t cells = 0, bad = 0;
  double worst = 0.0;
  std::string first_bad;
  while (reader.next(f)) {
    const std::string& base = f[0];
    const std::size_t l = std::stoul(f[1]);
    const std::string& dataset = f[2];
    const double published = std::stod(f[3]);
    const auto a = means.find(RunKey{dataset, l, "Individual", base});
    const auto b = means.find(RunKey{dataset, 3, "Individual", base});
    ++cells;
    if (a == means.end() || b == means.end()) {
      ++bad;
      if (first_bad.empty()) first_bad = base + "/" + dataset + "/l=" + f[1] + " missing accuracy";
      continue;
    }
    const double got = relative_difference(a->second, b->second);
    const double dev = std::abs(got - published);
    worst = std::max(worst, dev);
    if (dev > 0.02) {
      ++bad;
      if (first_bad.empty()) first_bad = fmt::format("{}/{}/l={}: {:.3f} vs {:.2f}", base, dataset, l, got, published);
    }
  }
  o.report(bad == 0 && cells > 0 ? Verdict::pass : Verdict::fail,
           fmt::format("C3 relative differences: {} DT/C-DT cells, {} outside +-0.02, max deviation {:.4f}{}", cells,
                       bad, worst, first_bad.empty() ? "" : "; first: " + first_bad));
}

// ------------------------------------------------------------------ C4

void check_c4(Outcome& o) {
  auto cfg = load_config(fs::path(PROCBENCH_CONFIG_DIR) / "individual_l3.json");
  cfg.output_dir = fs::temp_directory_path() / "procbench_acceptance_c4";
  cfg.workers = 1;
  fs::remove_all(cfg.output_dir);
  std::ostringstream sink;
  const auto t0 = Clock::now();
  const int code = cmd_bench(cfg, sink);
  const double elapsed = seconds_since(t0);
  if (code != kExitOk) {
    o.report(Verdict::fail, fmt::format("C4 bench exited with {}", code));
    return;
  }
  std::ifstream in(cfg.output_dir / "runs.csv");
  const auto means = cell_means(read_runs_csv(in));
  const auto groups = read_groups_csv(cfg.output_dir / "datasets.csv");
  auto acc = [&](const std::string& d, const std::string& b) -> std::optional<double> {
    const auto it = means.find(RunKey{d, 3, "Individual", b});
    if (it == means.end()) return std::nullopt;
    return 100.0 * it->second;
  };
  auto range_check = [&](const std::string& d, double lo, double hi, double published, const char* note) {
    const auto v = acc(d, "DT");
    if (!v) {
      o.report(Verdict::fail, "C4 " + d + ": no DT accuracy");
      return;
    }
    const bool ok = *v >= lo && *v <= hi;
    o.report(ok ? Verdict::pass : Verdict::fail,
             fmt::format("C4 {} DT l=3: {:.2f}% (required [{}, {}], published {:.2f}){}", d, *v, lo, hi, published,
                         note ? std::string("; ") + note : ""));
  };
  range_check("Road Traffic", 90, 100, 96.21, "run on the 5000-case substitute sample");
  range_check("Helpdesk", 58, 74, 66.42, "run on the 4580-case substitute release");
  range_check("Sepsis", 45, 60, 53.32, nullptr);

  // Mean of the three best classifiers per log, averaged per group.
  std::map<std::string, std::vector<double>> top3;
  for (const auto& [dataset, level] : groups) {
    std::vector<double> vals;
    for (const auto& b : cfg.base_learners) {
      if (const auto v = acc(dataset, b.id)) vals.push_back(*v);
    }
    std::sort(vals.rbegin(), vals.rend());
    if (vals.size() >= 3) top3[level].push_back((vals[0] + vals[1] + vals[2]) / 3);
  }
  const double low = mean(top3["Low"]), high = mean(top3["High"]);
  const bool gap_ok = !top3["Low"].empty() && !top3["High"].empty() && low - high >= 10.0;
  o.report(gap_ok ? Verdict::pass : Verdict::fail,
           fmt::format("C4 top-3 accuracy: Low {:.2f}% vs High {:.2f}% (gap {:.2f}, required >= 10); Low group is "
                       "the Helpdesk and Road Traffic substitutes, Hospital Billing unavailable",
                       low, high, low - high));
  o.report(elapsed <= 1800 ? Verdict::pass : Verdict::fail,
           fmt::format("C4 runtime: {:.0f}s single-threaded for 7 learners x 5 logs x 30 repetitions (limit 1800s)",
                       elapsed));
}

// ------------------------------------------------------------------ C5

void check_c5(Outcome& o) {
  const auto f = friedman_test(rank_blocks({{3, 2, 1}, {3, 2, 1}, {3, 2, 1}}));
  const double dchi = std::abs(f.chi2 - 6.0), dp = std::abs(f.p_value - std::exp(-3.0));
  o.report(dchi <= 1e-9 && dp <= 1e-9 ? Verdict::pass : Verdict::fail,
           fmt::format("C5 Friedman 3x3 strict ranks: chi2 {:.12f}, p {:.12f} (|dchi2| {:.1e}, |dp| {:.1e})", f.chi2,
                       f.p_value, dchi, dp));

  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = 0.25 * i;
    worst = std::max(worst, std::abs(chi_square_sf(x, 2) - std::exp(-x / 2)));
  }
  o.report(worst <= 1e-10 ? Verdict::pass : Verdict::fail,
           fmt::format("C5 chi-square df=2 vs exp(-x/2) on 100 points: max error {:.2e}", worst));

  const auto c = rom_critical_values(4, 0.05);
  const auto oracle = testing::rom_oracle(4, 0.05);
  const double published[] = {0.05, 0.025, 0.0169, 0.0127};
  bool ok = true;
  std::string vals;
  for (std::size_t i = 0; i < 4; ++i) {
    ok &= std::abs(c[i] - oracle[i]) <= 1e-9 * oracle[i];
    ok &= fmt::format("{:.3g}", c[i]) == fmt::format("{:.3g}", published[i]);
    vals += fmt::format("{}{:.6g}", i ? ", " : "", c[i]);
  }
  o.report(ok ? Verdict::pass : Verdict::fail,
           "C5 Rom critical values m<=4 at 0.05: " + vals +
               " (independent oracle agrees to 1e-9; 3 s.f. 0.05, 0.025, 0.0169, 0.0127)");
}

// ------------------------------------------------------------------ C6

void check_c6(Outcome& o) {
  constexpr std::size_t n = 1000;
  const std::vector<std::pair<const char*, std::function<testing::PropertyResult()>>> props{
      {"probability distributions (7 learners, 5 ensembles)", [] { return testing::prop_distributions(n, 11); }},
      {"nested dichotomy tree sums", [] { return testing::prop_dichotomy_tree_sums(n, 12); }},
      {"bagging/dagging/subspace member permutation", [] { return testing::prop_member_permutation(n, 13); }},
      {"window count formula vs brute force", [] { return testing::prop_window_counts(n, 14); }},
      {"rank row sums", [] { return testing::prop_rank_row_sums(n, 15); }},
  };
  for (const auto& [name, run] : props) {
    const auto r = run();
    o.report(r.ok() && r.cases >= n ? Verdict::pass : Verdict::fail,
             fmt::format("C6 {}: {} cases, {} failures{}", name, r.cases, r.failures,
                         r.first_failure.empty() ? "" : "; first: " + r.first_failure));
  }
}

// ------------------------------------------------------------------ C7

std::map<std::string, std::string> output_files(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return files;
}

void check_c7(Outcome& o) {
  auto cfg = full_config();
  for (auto& d : cfg.datasets) {
    if (d.name == "Sepsis") {
      cfg.datasets = {d};
      break;
    }
  }
  cfg.window_sizes = {3, 4};
  cfg.schemes = {Scheme::Individual, Scheme::Bagging, Scheme::RandomSubspace, Scheme::Dagging};
  cfg.base_learners = {{"DT", {}}, {"NB", {}}, {"RT", {}}};
  cfg.plan.repetitions = 2;
  const fs::path root = fs::temp_directory_path() / "procbench_acceptance_c7";
  fs::remove_all(root);
  std::vector<std::map<std::string, std::string>> outputs;
  const std::vector<std::size_t> workers{1, 1, 3};
  for (std::size_t i = 0; i < workers.size(); ++i) {
    cfg.workers = workers[i];
    cfg.output_dir = root / ("run" + std::to_string(i));
    std::ostringstream sink;
    if (cmd_bench(cfg, sink) != kExitOk) {
      o.report(Verdict::fail, "C7 bench run " + std::to_string(i) + " did not succeed");
      return;
    }
    outputs.push_back(output_files(cfg.output_dir));
  }
  const auto& ref = outputs.front();
  const bool has_runs = ref.count("runs.csv") && ref.at("runs.csv").size() > 100;
  o.report(has_runs && outputs[1] == ref ? Verdict::pass : Verdict::fail,
           fmt::format("C7 two runs with identical config and seed: {} files byte-identical", ref.size()));
  o.report(has_runs && outputs[2] == ref ? Verdict::pass : Verdict::fail,
           "C7 --workers 1 vs 3: output files byte-identical");
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  std::string check = "all";
  if (argc == 3 && std::string(argv[1]) == "--check") {
    check = argv[2];
  } else if (argc != 1) {
    std::cerr << "usage: acceptance [--check <name>]\n";
    return 2;
  }
  Outcome o;
  const std::map<std::string, std::function<void()>> simple{
      {"c2_partition", [&] { check_c2_partition(o); }},
      {"c3", [&] { check_c3(o); }},
      {"c4", [&] { check_c4(o); }},
      {"c5", [&] { check_c5(o); }},
      {"c6", [&] { check_c6(o); }},
      {"c7", [&] { check_c7(o); }},
  };
  std::vector<std::string> todo;
  if (check == "all") {
    for (const auto& r : references()) todo.push_back("c1_" + r.check);
    for (const auto& r : references()) todo.push_back("c2_" + r.check);
    for (const auto& [name, fn] : simple) todo.push_back(name);
  } else {
    todo.push_back(check);
  }
  try {
    for (const auto& name : todo) {
      if (const auto it = simple.find(name); it != simple.end()) {
        it->second();
      } else if (name.rfind("c1_", 0) == 0 && find_reference(name.substr(3))) {
        check_c1(*find_reference(name.substr(3)), o);
      } else if (name.rfind("c2_", 0) == 0 && find_reference(name.substr(3))) {
        check_c2(*find_reference(name.substr(3)), o);
      } else {
        std::cerr << "unknown check '" << name << "'\n";
        return 2;
      }
    }
  } catch (const std::exception& e) {
    o.report(Verdict::fail, std::string("error: ") + e.what());
  }
  return o.code();
}
