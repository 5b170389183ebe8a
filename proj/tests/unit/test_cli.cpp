#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "procbench/cli/commands.hpp"
#include "procbench/cli/config.hpp"
#include "procbench/util/csv.hpp"
#include "procbench/util/errors.hpp"

using namespace procbench;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("procbench_unit_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  csv::Reader r(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> f;
  while (r.next(f)) rows.push_back(f);
  return rows;
}

// `traces` copies of one fixed trace; every window is therefore deterministic.
void write_repeated_log(const fs::path& p, std::size_t traces, const std::vector<std::string>& types) {
  std::ofstream out(p);
  out << "case_id,event_type,timestamp\n";
  for (std::size_t c = 0; c < traces; ++c) {
    for (std::size_t i = 0; i < types.size(); ++i) {
      out << "c" << c << "," << types[i] << ",2021-03-0" << 1 + i % 9 << "T1" << i % 10 << ":00:00\n";
    }
  }
}

void ensure_oracle_learner() {
  register_learner("ORACLE", [](const LearnerSpec&) { return std::make_shared<testing::MemoriseLearner>(); });
}

std::string toy_config(const fs::path& dir, const std::string& extra) {
  return R"({
    "datasets": [
      {"name": "Alpha", "path": ")" + (dir / "alpha.csv").string() + R"(", "format": "csv"},
      {"name": "Beta", "path": ")" + (dir / "beta.csv").string() + R"(", "format": "csv"}
    ],
    "output_dir": ")" + (dir / "out").string() + "\"" + extra + "}";
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const auto dir = fresh_dir("defaults");
  write_repeated_log(dir / "alpha.csv", 3, {"a", "b", "c", "d"});
  write_repeated_log(dir / "beta.csv", 3, {"a", "b", "c", "d"});
  const auto cfg = parse_config(toy_config(dir, ""), dir);
  CHECK(cfg.window_sizes == std::vector<std::size_t>{3, 4, 5, 6, 7, 8});
  CHECK(cfg.schemes.size() == 6);
  CHECK(cfg.base_learners.size() == 7);
  CHECK(cfg.plan.repetitions == 30);
  CHECK(cfg.plan.train_fraction == doctest::Approx(0.67));
  CHECK(cfg.ensemble.bagging == 10);
  CHECK(cfg.ensemble.dagging == 10);
  CHECK(cfg.dataset("Beta").format == LogFormat::csv);
  CHECK_THROWS_AS(cfg.dataset("Gamma"), ConfigError);

  const auto tuned = parse_config(toy_config(dir, R"(, // comments are allowed
    "window_sizes": [4], "schemes": ["Bagging"], "workers": 2,
    "base_learners": ["DT", {"id": "KNN", "params": {"k": 3}}],
    "plan": {"repetitions": 4, "master_seed": 9})"), dir);
  CHECK(tuned.window_sizes == std::vector<std::size_t>{4});
  REQUIRE(tuned.base_learners.size() == 2);
  CHECK(tuned.base_learners[1].params.at("k") == 3);
  CHECK(tuned.plan.master_seed == 9);
  CHECK(tuned.workers == 2);
  CHECK(tuned.ensemble_spec(Scheme::Bagging, tuned.base_learners[0]).members == 10);
}

TEST_CASE("config errors") {
  const auto dir = fresh_dir("errors");
  write_repeated_log(dir / "alpha.csv", 3, {"a", "b", "c", "d"});
  write_repeated_log(dir / "beta.csv", 3, {"a", "b", "c", "d"});
  CHECK_THROWS_AS(parse_config("{", dir), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"datasets\": []}", dir), ConfigError);
  CHECK_THROWS_AS(parse_config(toy_config(dir, ", \"windows\": [3]"), dir), ConfigError);
  CHECK_THROWS_AS(parse_config(toy_config(dir, ", \"window_sizes\": [0]"), dir), ConfigError);
  CHECK_THROWS_AS(parse_config(toy_config(dir, ", \"schemes\": [\"Stacking\"]"), dir), ConfigError);
  CHECK_THROWS_AS(parse_config(toy_config(dir, ", \"base_learners\": [\"SVM\"]"), dir), ConfigError);
  CHECK_THROWS_AS(parse_config(toy_config(dir, ", \"base_learners\": [{\"id\": \"KNN\", \"params\": {\"k\": 0}}]"), dir),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(toy_config(dir, ", \"plan\": {\"train_fraction\": 1.5}"), dir), ConfigError);
  CHECK_THROWS_AS(parse_config(toy_config(dir, ", \"coverage_rule\": \"most\""), dir), ConfigError);
  fs::remove(dir / "beta.csv");
  try {
    parse_config(toy_config(dir, ""), dir);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("Beta") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
  CHECK(exit_code_for(DataError("x")) == kExitData);
  CHECK(exit_code_for(EmptyDatasetError("x")) == kExitData);
  CHECK(exit_code_for(InputError("x")) == kExitData);
  CHECK(exit_code_for(InternalError("x")) == kExitRuntime);
  CHECK(exit_code_for(ArithmeticError("x")) == kExitRuntime);
  CHECK(exit_code_for(std::runtime_error("x")) == kExitRuntime);
}

TEST_CASE("podium markers") {
  const std::vector<std::optional<double>> v{0.5, 0.9, std::nullopt, 0.7, 0.9, 0.1};
  const auto p = podium(v, false);
  CHECK(p == std::vector<int>{3, 1, 0, 2, 1, 0});
  const auto q = podium(v, true);
  CHECK(q[5] == 1);
  CHECK(q[0] == 2);
  CHECK(q[3] == 3);
  CHECK(decorate("1.00", 1) == "**1.00**");
  CHECK(decorate("1.00", 2) == "<u>1.00</u>");
  CHECK(decorate("1.00", 3) == "*1.00*");
  CHECK(decorate("1.00", 0) == "1.00");
}

TEST_CASE("bench grid with an oracle learner") {
  ensure_oracle_learner();
  const auto dir = fresh_dir("bench");
  write_repeated_log(dir / "alpha.csv", 20, {"a", "b", "c", "d", "e", "f"});
  write_repeated_log(dir / "beta.csv", 15, {"s", "t", "u", "s", "t", "v", "w"});
  auto cfg = parse_config(toy_config(dir, R"(, "window_sizes": [3, 4, 8], "schemes": ["Individual"],
    "base_learners": ["ORACLE", "DS"], "plan": {"repetitions": 3})"), dir);
  std::ostringstream log;
  CHECK(cmd_bench(cfg, log) == kExitOk);

  const auto runs = read_rows(dir / "out" / "runs.csv");
  REQUIRE(!runs.empty());
  CHECK(runs[0] == std::vector<std::string>{"dataset", "window", "scheme", "base", "rep", "accuracy"});
  CHECK(runs.size() == 1 + 2 * 2 * 1 * 2 * 3);
  std::size_t oracle = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i][3] == "ORACLE") {
      ++oracle;
      CHECK(std::stod(runs[i][5]) == 1.0);
    }
  }
  CHECK(oracle == 12);

  const auto skipped = read_rows(dir / "out" / "skipped.csv");
  REQUIRE(skipped.size() == 1 + 2 * 2);
  for (std::size_t i = 1; i < skipped.size(); ++i) {
    CHECK(skipped[i][1] == "8");
    CHECK(skipped[i][4].find("empty") != std::string::npos);
  }

  const auto means = read_rows(dir / "out" / "means.csv");
  CHECK(means.size() == 1 + 2 * 2 * 2);
  const auto table = slurp(dir / "out" / "tables" / "Individual.md");
  CHECK(table.find("**100.00**") != std::string::npos);
  CHECK(table.find("skipped") != std::string::npos);
  CHECK(table.find("Average Friedman rank") != std::string::npos);
  const auto groups = read_groups_csv(dir / "out" / "datasets.csv");
  CHECK(groups.at("Alpha") == "High");
  CHECK(groups.size() == 2);

  cfg.base_learners.push_back(cfg.base_learners.front());
  CHECK_THROWS_AS(cmd_bench(cfg, log), ConfigError);
}

TEST_CASE("encode and profile commands") {
  const auto dir = fresh_dir("encode");
  write_repeated_log(dir / "alpha.csv", 4, {"a", "b", "c", "d", "e"});
  write_repeated_log(dir / "beta.csv", 2, {"a", "b"});
  const auto cfg = parse_config(toy_config(dir, ""), dir);
  std::ostringstream out;
  CHECK(cmd_encode(cfg, "Alpha", 3, out) == kExitOk);
  CHECK(out.str().find("8 samples") != std::string::npos);
  const auto rows = read_rows(dir / "out" / "encoded" / "Alpha_l3.csv");
  CHECK(rows.size() == 9);
  CHECK_THROWS_AS(cmd_encode(cfg, "Beta", 3, out), EmptyDatasetError);
  CHECK_THROWS_AS(cmd_encode(cfg, "Nope", 3, out), ConfigError);

  std::ostringstream prof;
  CHECK(cmd_profile(cfg, prof) == kExitOk);
  CHECK(prof.str().find("Alpha") != std::string::npos);
  CHECK(fs::exists(dir / "out" / "profile.csv"));
}

TEST_CASE("stats command") {
  const auto dir = fresh_dir("stats");
  {
    std::ofstream f(dir / "flat.csv");
    f << "dataset,window,scheme,base,rep,accuracy\n";
    for (int d = 0; d < 3; ++d) {
      for (int l = 3; l <= 5; ++l) {
        for (const char* b : {"A", "B", "C"}) f << "D" << d << "," << l << ",Individual," << b << ",0,0." << 5 + d << "\n";
      }
    }
  }
  StatsOptions opt;
  opt.runs = dir / "flat.csv";
  opt.output_dir = dir / "out";
  std::ostringstream out;
  CHECK(cmd_stats(opt, out) == kExitOk);
  CHECK(out.str().find("H0 not rejected") != std::string::npos);
  CHECK(out.str().find("Control") == std::string::npos);
  CHECK(fs::exists(dir / "out" / "stats" / "Individual_all.md"));
  CHECK(fs::exists(dir / "out" / "stats" / "Individual_all.csv"));

  {
    std::ofstream f(dir / "dominant.csv");
    f << "dataset,window,scheme,base,rep,accuracy\n";
    for (int d = 0; d < 3; ++d) {
      for (int l = 3; l <= 8; ++l) {
        for (int r = 0; r < 2; ++r) {
          f << "D" << d << "," << l << ",Bagging,DT," << r << ",0.4\n";
          f << "D" << d << "," << l << ",Bagging,NB," << r << ",0.9" << d << "\n";
          f << "D" << d << "," << l << ",Bagging,CR," << r << ",0.3" << l << "\n";
          f << "D" << d << "," << l << ",Bagging,DS," << r << ",0.2" << (l + d) % 10 << "\n";
        }
      }
    }
  }
  opt.runs = dir / "dominant.csv";
  std::ostringstream dom;
  CHECK(cmd_stats(opt, dom) == kExitOk);
  CHECK(dom.str().find("H0 rejected") != std::string::npos);
  CHECK(dom.str().find("Control: NB") != std::string::npos);
  CHECK(dom.str().find("18") != std::string::npos);

  opt.scheme = "Boosting";
  CHECK_THROWS_AS(cmd_stats(opt, dom), DataError);
  opt.scheme = "Bagging";
  opt.group = "Low";
  CHECK_THROWS_AS(cmd_stats(opt, dom), DataError);
}

TEST_CASE("report command reproduces the published relative difference") {
  const auto dir = fresh_dir("report");
  ReportOptions opt;
  opt.runs = fs::path(PROCBENCH_TEST_DATA) / "published_individual_accuracy.csv";
  opt.scheme = "Individual";
  opt.bases = {"C-DT"};
  opt.output_dir = dir;
  std::ostringstream out;
  CHECK(cmd_report(opt, out) == kExitOk);
  const auto rows = read_rows(dir / "relative_differences.csv");
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == std::vector<std::string>{"scheme", "base", "dataset", "window", "relative_difference"});
  bool found = false;
  for (const auto& r : rows) {
    if (r[1] == "C-DT" && r[2] == "Helpdesk" && r[3] == "4") {
      found = true;
      CHECK(std::abs(std::stod(r[4]) - 13.85) <= 0.02);
    }
  }
  CHECK(found);
  CHECK(fs::exists(dir / "relative_differences.md"));
  opt.bases = {"XYZ"};
  CHECK_THROWS_AS(cmd_report(opt, out), DataError);
}
