#include "procbench/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "procbench/encoding/encoding.hpp"
#include "procbench/ml/dataset.hpp"
#include "procbench/stats/report.hpp"
#include "procbench/util/csv.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
  if (const auto* pe = dynamic_cast<const Error*>(&e)) {
    switch (pe->kind()) {
      case ErrorKind::config: return kExitConfig;
      case ErrorKind::data:
      case ErrorKind::input: return kExitData;
      case ErrorKind::internal:
      case ErrorKind::arithmetic: return kExitRuntime;
    }
  }
  return kExitRuntime;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::string pct(double fraction) { return csv::fixed(100.0 * fraction, 2); }

bool is_panic(const std::exception& e) { return exit_code_for(e) == kExitRuntime; }

}  // namespace

// ---------------------------------------------------------------- profile

int cmd_profile(const BenchmarkConfig& cfg, std::ostream& out) {
  int code = kExitOk;
  auto csv_out = open_out(cfg.output_dir / "profile.csv");
  csv::write_row(csv_out, {"dataset", "cases", "events", "event_types", "variants", "variants_to_80pct", "ratio",
                           "mean_trace_len", "median_trace_len", "level"});
  out << "| Dataset | Cases | Events | Event types | Variants | Variants to 80% | Ratio | Mean length | "
         "Median length | Level |\n|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& ds : cfg.datasets) {
    try {
      const EventLog log = load_dataset(ds);
      const auto p = profile_variability(log, cfg.variability_threshold, cfg.coverage_rule);
      const std::vector<std::string> row{ds.name,
                                         std::to_string(p.num_cases),
                                         std::to_string(p.num_events),
                                         std::to_string(p.num_event_types),
                                         std::to_string(p.num_variants),
                                         std::to_string(p.variants_to_80pct),
                                         csv::fixed(p.ratio, 4),
                                         csv::fixed(p.mean_trace_len, 2),
                                         csv::fixed(p.median_trace_len, 1),
                                         std::string(to_string(p.level))};
      csv::write_row(csv_out, row);
      out << "|";
      for (const auto& c : row) out << " " << c << " |";
      out << "\n";
    } catch (const std::exception& e) {
      spdlog::error("dataset '{}': {}", ds.name, e.what());
      code = std::max(code, is_panic(e) ? kExitRuntime : kExitData);
    }
  }
  return code;
}

// ---------------------------------------------------------------- encode

int cmd_encode(const BenchmarkConfig& cfg, const std::string& dataset, std::size_t window, std::ostream& out) {
  const auto& ds = cfg.dataset(dataset);
  const EventLog log = load_dataset(ds);
  const EncodedDataset enc = encode_log(log, window);
  const auto path = export_encoded(enc, cfg.output_dir / "encoded", ds.name + "_l" + std::to_string(window));
  out << ds.name << " l=" << window << ": " << enc.samples.size() << " samples -> " << path.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- shared table helpers

std::vector<int> podium(const std::vector<std::optional<double>>& values, bool lower_is_better) {
  std::vector<double> distinct;
  for (const auto& v : values) {
    if (v) distinct.push_back(*v);
  }
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (!lower_is_better) std::reverse(distinct.begin(), distinct.end());
  std::vector<int> place(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    const auto pos = std::find(distinct.begin(), distinct.end(), *values[i]) - distinct.begin();
    if (pos < 3) place[i] = static_cast<int>(pos) + 1;
  }
  return place;
}

std::string decorate(const std::string& text, int place) {
  switch (place) {
    case 1: return "**" + text + "**";
    case 2: return "<u>" + text + "</u>";
    case 3: return "*" + text + "*";
    default: return text;
  }
}

std::map<std::string, std::string> read_groups_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw DataError(path.string() + " is empty");
  const auto name_col = std::find(row.begin(), row.end(), "dataset") - row.begin();
  const auto level_col = std::find(row.begin(), row.end(), "level") - row.begin();
  if (static_cast<std::size_t>(name_col) == row.size() || static_cast<std::size_t>(level_col) == row.size()) {
    throw DataError(path.string() + " needs dataset and level columns");
  }
  const std::size_t width = row.size();
  std::map<std::string, std::string> groups;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != width) throw RowError(reader.line(), "field count does not match the header");
    groups[row[static_cast<std::size_t>(name_col)]] = row[static_cast<std::size_t>(level_col)];
  }
  return groups;
}

// ---------------------------------------------------------------- bench

namespace {

struct Cell {
  RunKey key;
  std::shared_ptr<const Dataset> data;
  LearnerPtr learner;
  std::optional<std::string> skip;
};

struct TaskOutcome {
  double accuracy = 0.0;
  std::optional<std::string> error;
  bool panic = false;
};

struct DatasetInfo {
  std::string name;
  std::optional<VariabilityProfile> profile;
  std::optional<std::string> failure;
};

void write_scheme_table(std::ostream& out, const BenchmarkConfig& cfg, Scheme scheme,
                        const std::vector<DatasetInfo>& infos, const std::map<RunKey, double>& means) {
  const std::string sname = to_string(scheme);
  out << "# " << sname << "\n\n";
  out << "Mean accuracy (%) over " << cfg.plan.repetitions << " holdout repetitions. First, second and third "
      << "place per row in bold, underline and italics.\n";
  for (const char* level : {"Low", "High"}) {
    std::vector<const DatasetInfo*> members;
    for (const auto& info : infos) {
      if (info.profile && to_string(info.profile->level) == level) members.push_back(&info);
    }
    if (members.empty()) continue;
    out << "\n## " << level << " variability\n\n| Dataset | l |";
    for (const auto& b : cfg.base_learners) out << " " << b.id << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < cfg.base_learners.size(); ++i) out << "---|";
    out << "\n";
    std::vector<std::vector<double>> complete;
    for (const auto* info : members) {
      for (std::size_t l : cfg.window_sizes) {
        std::vector<std::optional<double>> row;
        for (const auto& b : cfg.base_learners) {
          const auto it = means.find(RunKey{info->name, l, sname, b.id});
          row.push_back(it == means.end() ? std::nullopt : std::optional<double>(it->second));
        }
        const auto place = podium(row, false);
        out << "| " << info->name << " | " << l << " |";
        bool full = true;
        std::vector<double> vals;
        for (std::size_t j = 0; j < row.size(); ++j) {
          if (row[j]) {
            out << " " << decorate(pct(*row[j]), place[j]) << " |";
            vals.push_back(*row[j]);
          } else {
            out << " skipped |";
            full = false;
          }
        }
        out << "\n";
        if (full) complete.push_back(std::move(vals));
      }
    }
    out << "| Average Friedman rank | |";
    if (complete.size() >= 2 && cfg.base_learners.size() >= 2) {
      const auto avg = average_rank(rank_blocks(complete));
      std::vector<std::optional<double>> r(avg.begin(), avg.end());
      const auto place = podium(r, true);
      for (std::size_t j = 0; j < avg.size(); ++j) out << " " << decorate(csv::fixed(avg[j], 2), place[j]) << " |";
    } else {
      for (std::size_t j = 0; j < cfg.base_learners.size(); ++j) out << " n/a |";
    }
    out << "\n";
  }
}

}  // namespace

int cmd_bench(const BenchmarkConfig& cfg, std::ostream& out) {
  {
    std::set<std::string> ids;
    for (const auto& b : cfg.base_learners) {
      if (!ids.insert(b.id).second) throw ConfigError("base learner '" + b.id + "' is listed twice");
    }
  }
  int code = kExitOk;

  // Logs, variability groups and encodings.
  std::vector<DatasetInfo> infos;
  std::vector<Cell> cells;
  for (const auto& ds : cfg.datasets) {
    DatasetInfo info{ds.name, std::nullopt, std::nullopt};
    std::optional<EventLog> log;
    try {
      log.emplace(load_dataset(ds));
      info.profile = profile_variability(*log, cfg.variability_threshold, cfg.coverage_rule);
    } catch (const std::exception& e) {
      spdlog::error("dataset '{}': {}", ds.name, e.what());
      info.failure = e.what();
      code = std::max(code, is_panic(e) ? kExitRuntime : kExitData);
    }
    for (std::size_t l : cfg.window_sizes) {
      std::shared_ptr<const Dataset> data;
      std::optional<std::string> skip = info.failure ? std::optional<std::string>("log not loaded: " + *info.failure)
                                                     : std::nullopt;
      if (!skip) {
        try {
          auto d = std::make_shared<Dataset>(to_dataset(encode_log(*log, l)));
          check_holdout_inputs(*d, cfg.plan);
          data = std::move(d);
        } catch (const Error& e) {
          if (e.kind() == ErrorKind::internal) throw;
          skip = e.what();
        }
      }
      for (Scheme s : cfg.schemes) {
        for (const auto& b : cfg.base_learners) {
          Cell c{RunKey{ds.name, l, to_string(s), b.id}, data, nullptr, skip};
          if (!skip) c.learner = make_ensemble(cfg.ensemble_spec(s, b));
          cells.push_back(std::move(c));
        }
      }
    }
    infos.push_back(std::move(info));
  }

  struct Task {
    std::size_t cell;
    std::size_t rep;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].skip) continue;
    for (std::size_t r = 0; r < cfg.plan.repetitions; ++r) tasks.push_back(Task{c, r});
  }
  spdlog::info("bench: {} cells, {} tasks, {} workers", cells.size(), tasks.size(), cfg.workers);

  std::vector<TaskOutcome> outcomes(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  const std::size_t step = std::max<std::size_t>(1, tasks.size() / 20);
  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const Cell& cell = cells[tasks[t].cell];
      TaskOutcome& o = outcomes[t];
      try {
        const LearnerPtr learner = cell.learner;
        const ModelFactory factory = [&learner](const Dataset& d, std::uint64_t seed) { return learner->fit(d, seed); };
        o.accuracy = evaluate_repetition(*cell.data, factory, cfg.plan, cell.key, tasks[t].rep).accuracy;
      } catch (const std::exception& e) {
        o.error = e.what();
        o.panic = is_panic(e);
      }
      const std::size_t n = done.fetch_add(1) + 1;
      if (n % step == 0 || n == tasks.size()) spdlog::info("bench: {}/{} tasks", n, tasks.size());
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(cfg.workers, tasks.size()));
  if (nthreads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(work);
  }

  // Collect in task order, so results do not depend on scheduling.
  std::vector<RunResult> runs;
  std::map<std::size_t, std::string> failed;  // cell -> first error
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& o = outcomes[t];
    if (o.error) {
      failed.emplace(tasks[t].cell, *o.error);
      if (o.panic) code = kExitRuntime;
    }
  }
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (failed.count(tasks[t].cell)) continue;
    runs.push_back(RunResult{cells[tasks[t].cell].key, tasks[t].rep, outcomes[t].accuracy});
  }
  struct Skip {
    RunKey key;
    std::string reason;
  };
  std::vector<Skip> skips;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].skip) skips.push_back(Skip{cells[c].key, *cells[c].skip});
  }
  for (const auto& [c, msg] : failed) {
    spdlog::error("cell {}/l={}/{}/{} failed: {}", cells[c].key.dataset, cells[c].key.window, cells[c].key.scheme,
                  cells[c].key.base, msg);
    skips.push_back(Skip{cells[c].key, "task failed: " + msg});
  }
  std::sort(skips.begin(), skips.end(), [](const Skip& a, const Skip& b) { return a.key < b.key; });

  const fs::path dir = cfg.output_dir;
  {
    auto f = open_out(dir / "runs.csv");
    write_runs_csv(f, runs);
  }
  {
    auto f = open_out(dir / "skipped.csv");
    csv::write_row(f, {"dataset", "window", "scheme", "base", "reason"});
    for (const auto& s : skips) {
      csv::write_row(f, {s.key.dataset, std::to_string(s.key.window), s.key.scheme, s.key.base, s.reason});
    }
  }
  {
    auto f = open_out(dir / "datasets.csv");
    csv::write_row(f, {"dataset", "cases", "variants", "variants_to_80pct", "ratio", "level"});
    std::vector<const DatasetInfo*> sorted;
    for (const auto& i : infos) sorted.push_back(&i);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });
    for (const auto* i : sorted) {
      if (!i->profile) continue;
      const auto& p = *i->profile;
      csv::write_row(f, {i->name, std::to_string(p.num_cases), std::to_string(p.num_variants),
                         std::to_string(p.variants_to_80pct), csv::fixed(p.ratio, 4), std::string(to_string(p.level))});
    }
  }
  const auto means = cell_means(runs);
  {
    std::map<std::string, std::string> level;
    for (const auto& i : infos) {
      if (i.profile) level[i.name] = std::string(to_string(i.profile->level));
    }
    auto f = open_out(dir / "means.csv");
    csv::write_row(f, {"dataset", "group", "window", "scheme", "base", "mean_accuracy"});
    for (const auto& [k, m] : means) {
      csv::write_row(f, {k.dataset, level[k.dataset], std::to_string(k.window), k.scheme, k.base, csv::fixed(m, 6)});
    }
  }
  for (Scheme s : cfg.schemes) {
    auto f = open_out(dir / "tables" / (to_string(s) + ".md"));
    write_scheme_table(f, cfg, s, infos, means);
  }
  out << "bench: " << runs.size() << " runs, " << skips.size() << " skipped cells -> " << dir.string() << "\n";
  return code;
}

// ---------------------------------------------------------------- stats

namespace {

std::vector<RunResult> load_runs(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_runs_csv(in);
}

std::string file_stem(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

// Rows: (dataset, window) blocks where every classifier has a value; columns: classifiers.
struct BlockMatrix {
  std::vector<std::string> classifiers;
  std::vector<std::pair<std::string, std::size_t>> blocks;
  std::vector<std::vector<double>> values;
};

BlockMatrix block_matrix(const std::map<RunKey, double>& means, const std::string& scheme,
                         const std::function<bool(const std::string&)>& in_group) {
  std::set<std::string> cls;
  std::set<std::pair<std::string, std::size_t>> blocks;
  for (const auto& [k, m] : means) {
    if (k.scheme != scheme || !in_group(k.dataset)) continue;
    cls.insert(k.base);
    blocks.emplace(k.dataset, k.window);
  }
  BlockMatrix bm;
  bm.classifiers.assign(cls.begin(), cls.end());
  for (const auto& b : blocks) {
    std::vector<double> row;
    for (const auto& c : bm.classifiers) {
      const auto it = means.find(RunKey{b.first, b.second, scheme, c});
      if (it == means.end()) break;
      row.push_back(it->second);
    }
    if (row.size() != bm.classifiers.size()) continue;
    bm.blocks.push_back(b);
    bm.values.push_back(std::move(row));
  }
  return bm;
}

}  // namespace

int cmd_stats(const StatsOptions& opt, std::ostream& out) {
  const auto runs = load_runs(opt.runs);
  const auto means = cell_means(runs);
  std::map<std::string, std::string> groups;
  const fs::path gpath = opt.groups ? *opt.groups : opt.runs.parent_path() / "datasets.csv";
  if (opt.groups || fs::exists(gpath)) groups = read_groups_csv(gpath);

  std::set<std::string> schemes;
  for (const auto& [k, m] : means) {
    if (opt.scheme == "all" || k.scheme == opt.scheme) schemes.insert(k.scheme);
  }
  if (schemes.empty()) throw DataError("no runs for scheme '" + opt.scheme + "'");
  std::vector<std::string> levels;
  if (opt.group != "all") {
    levels.push_back(opt.group);
  } else if (groups.empty()) {
    levels.push_back("all");
  } else {
    std::set<std::string> s;
    for (const auto& [d, g] : groups) s.insert(g);
    levels.assign(s.begin(), s.end());
  }
  const bool explicit_request = opt.scheme != "all" || opt.group != "all";
  std::size_t written = 0;
  for (const auto& scheme : schemes) {
    for (const auto& level : levels) {
      auto in_group = [&](const std::string& d) {
        if (level == "all" && groups.empty()) return true;
        const auto it = groups.find(d);
        return it != groups.end() && it->second == level;
      };
      const auto bm = block_matrix(means, scheme, in_group);
      if (bm.values.size() < 2 || bm.classifiers.size() < 2) {
        const std::string msg = "insufficient blocks for " + scheme + " / " + level + ": " +
                                std::to_string(bm.values.size()) + " blocks, " +
                                std::to_string(bm.classifiers.size()) + " classifiers";
        if (explicit_request) throw DataError(msg);
        spdlog::warn("{}", msg);
        continue;
      }
      const auto report = build_test_report(level, scheme, bm.classifiers, bm.values, opt.alpha);
      write_report_markdown(out, report);
      const fs::path base = opt.output_dir / "stats" / (file_stem(scheme) + "_" + file_stem(level));
      auto md = open_out(fs::path(base.string() + ".md"));
      write_report_markdown(md, report);
      auto csvf = open_out(fs::path(base.string() + ".csv"));
      write_report_csv(csvf, report);
      ++written;
    }
  }
  if (written == 0) throw DataError("no scheme/group combination has at least 2 complete blocks");
  return kExitOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const ReportOptions& opt, std::ostream& out) {
  const auto means = cell_means(load_runs(opt.runs));
  std::set<std::string> schemes;
  std::set<std::string> datasets;
  std::set<std::size_t> windows;
  for (const auto& [k, m] : means) {
    if (opt.scheme != "all" && k.scheme != opt.scheme) continue;
    schemes.insert(k.scheme);
    datasets.insert(k.dataset);
    windows.insert(k.window);
  }
  if (schemes.empty()) throw DataError("no runs for scheme '" + opt.scheme + "'");
  const std::size_t baseline = opt.baseline ? *opt.baseline : *windows.begin();

  auto csvf = open_out(opt.output_dir / "relative_differences.csv");
  auto md = open_out(opt.output_dir / "relative_differences.md");
  csv::write_row(csvf, {"scheme", "base", "dataset", "window", "relative_difference"});
  std::ostringstream table;
  table << "# Relative differences (%) against l = " << baseline << "\n\n| Scheme | Classifier | l |";
  for (const auto& d : datasets) table << " " << d << " |";
  table << "\n|---|---|---|";
  for (std::size_t i = 0; i < datasets.size(); ++i) table << "---|";
  table << "\n";
  std::size_t written = 0;
  for (const auto& scheme : schemes) {
    std::vector<std::string> bases = opt.bases;
    if (bases.empty()) {
      const auto bm = block_matrix(means, scheme, [](const std::string&) { return true; });
      if (bm.values.size() < 2 || bm.classifiers.size() < 2) {
        throw DataError("cannot pick the best classifiers of " + scheme + ": fewer than 2 complete blocks");
      }
      const auto avg = average_rank(rank_blocks(bm.values));
      std::vector<std::size_t> order(avg.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return avg[a] < avg[b]; });
      for (std::size_t i = 0; i < std::min<std::size_t>(2, order.size()); ++i) bases.push_back(bm.classifiers[order[i]]);
    }
    for (const auto& base : bases) {
      for (std::size_t l : windows) {
        if (l == baseline) continue;
        table << "| " << scheme << " | " << base << " | " << l << " |";
        for (const auto& d : datasets) {
          const auto cur = means.find(RunKey{d, l, scheme, base});
          const auto ref = means.find(RunKey{d, baseline, scheme, base});
          if (cur == means.end() || ref == means.end() || !(ref->second > 0)) {
            table << " n/a |";
            continue;
          }
          const double rd = relative_difference(cur->second, ref->second);
          csv::write_row(csvf, {scheme, base, d, std::to_string(l), csv::fixed(rd, 2)});
          ++written;
          table << " " << csv::fixed(rd, 2) << " |";
        }
        table << "\n";
      }
    }
  }
  if (written == 0) throw DataError("no relative differences: the requested classifiers have no runs at two windows");
  md << table.str();
  out << table.str();
  return kExitOk;
}

}  // namespace procbench
