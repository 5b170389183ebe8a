#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "procbench/ml/model.hpp"

namespace procbench {

struct SplitPlan {
  double train_fraction = 0.67;
  std::size_t repetitions = 30;
  std::uint64_t master_seed = 1;

  void validate() const;
};

// Identifies one grid cell.
struct RunKey {
  std::string dataset;
  std::size_t window = 0;
  std::string scheme;
  std::string base;

  auto tie() const { return std::tie(dataset, window, scheme, base); }
  bool operator<(const RunKey& o) const { return tie() < o.tie(); }
  bool operator==(const RunKey& o) const { return tie() == o.tie(); }
};

struct RunResult {
  RunKey key;
  std::size_t repetition = 0;
  double accuracy = 0.0;
};

// The split of repetition r depends on (master_seed, dataset, window, r) only, so every
// classifier of a cell is evaluated on identical splits; the model seed adds scheme and base.
std::uint64_t split_seed(const SplitPlan& plan, const RunKey& key, std::size_t repetition);
std::uint64_t model_seed(const SplitPlan& plan, const RunKey& key, std::size_t repetition);

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
HoldoutSplit holdout_split(std::size_t n, double train_fraction, std::uint64_t seed);

using ModelFactory = std::function<ModelPtr(const Dataset&, std::uint64_t seed)>;

struct HoldoutResult {
  std::vector<RunResult> runs;
  double mean_accuracy = 0.0;
};

// Throws DataError with fewer than 3 samples or 2 classes; validates the plan.
void check_holdout_inputs(const Dataset& data, const SplitPlan& plan);
// One repetition; throws ConfigError when the test fold is empty.
RunResult evaluate_repetition(const Dataset& data, const ModelFactory& make_model, const SplitPlan& plan,
                              const RunKey& key, std::size_t repetition);

// Throws DataError with fewer than 3 samples or 2 classes, ConfigError on an empty test fold.
HoldoutResult repeated_holdout(const Dataset& data, const ModelFactory& make_model, const SplitPlan& plan,
                               const RunKey& key);

// 100 * (acc_l - baseline) / baseline; ArithmeticError unless baseline > 0.
double relative_difference(double acc_l, double acc_baseline);

struct RankMatrix {
  std::vector<std::vector<double>> ranks;  // N blocks x k classifiers

  std::size_t blocks() const noexcept { return ranks.size(); }
  std::size_t classifiers() const noexcept { return ranks.empty() ? 0 : ranks.front().size(); }
};

// Per row: rank 1 for the highest accuracy, average ranks for ties.
RankMatrix rank_blocks(const std::vector<std::vector<double>>& accuracies);
std::vector<double> average_rank(const RankMatrix& rm);

double mean(const std::vector<double>& values);

// Canonical order: dataset, window, scheme, base, repetition.
void sort_runs(std::vector<RunResult>& runs);
void write_runs_csv(std::ostream& out, std::vector<RunResult> runs);
std::vector<RunResult> read_runs_csv(std::istream& in);

// Mean accuracy per cell.
std::map<RunKey, double> cell_means(const std::vector<RunResult>& runs);

}  // namespace procbench
