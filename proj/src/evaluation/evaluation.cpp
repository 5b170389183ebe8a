#include "procbench/evaluation/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "procbench/util/csv.hpp"
#include "procbench/util/errors.hpp"
#include "procbench/util/rng.hpp"

namespace procbench {

void SplitPlan::validate() const {
  if (!(train_fraction > 0 && train_fraction < 1)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
}

std::uint64_t split_seed(const SplitPlan& plan, const RunKey& key, std::size_t repetition) {
  std::uint64_t h = hash_combine(plan.master_seed, std::string_view(key.dataset));
  h = hash_combine(h, std::uint64_t{key.window});
  return hash_combine(h, std::uint64_t{repetition});
}

std::uint64_t model_seed(const SplitPlan& plan, const RunKey& key, std::size_t repetition) {
  std::uint64_t h = hash_combine(split_seed(plan, key, repetition), std::string_view(key.scheme));
  return hash_combine(h, std::string_view(key.base));
}

HoldoutSplit holdout_split(std::size_t n, double train_fraction, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(idx));
  const auto train = static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n) - 1e-9));
  HoldoutSplit s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(std::min(train, n)));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(std::min(train, n)), idx.end());
  return s;
}

void check_holdout_inputs(const Dataset& data, const SplitPlan& plan) {
  plan.validate();
  if (data.size() < 3) throw DataError("holdout needs at least 3 samples, got " + std::to_string(data.size()));
  const auto cw = data.class_weights();
  if (std::count_if(cw.begin(), cw.end(), [](double w) { return w > 0; }) < 2) {
    throw DataError("holdout needs at least 2 classes");
  }
}

RunResult evaluate_repetition(const Dataset& data, const ModelFactory& make_model, const SplitPlan& plan,
                              const RunKey& key, std::size_t repetition) {
  const auto split = holdout_split(data.size(), plan.train_fraction, split_seed(plan, key, repetition));
  if (split.test.empty()) throw ConfigError("holdout split leaves the test fold empty");
  const Dataset train = data.subset(split.train);
  const ModelPtr model = make_model(train, model_seed(plan, key, repetition));
  std::size_t correct = 0;
  for (std::size_t i : split.test) correct += model->predict_label(data.row(i)) == data.label(i);
  return RunResult{key, repetition, static_cast<double>(correct) / static_cast<double>(split.test.size())};
}

HoldoutResult repeated_holdout(const Dataset& data, const ModelFactory& make_model, const SplitPlan& plan,
                               const RunKey& key) {
  check_holdout_inputs(data, plan);
  HoldoutResult out;
  for (std::size_t r = 0; r < plan.repetitions; ++r) out.runs.push_back(evaluate_repetition(data, make_model, plan, key, r));
  std::vector<double> accs;
  for (const auto& r : out.runs) accs.push_back(r.accuracy);
  out.mean_accuracy = mean(accs);
  return out;
}

double relative_difference(double acc_l, double acc_baseline) {
  if (!(acc_baseline > 0)) throw ArithmeticError("relative difference needs a positive baseline");
  return 100.0 * (acc_l - acc_baseline) / acc_baseline;
}

RankMatrix rank_blocks(const std::vector<std::vector<double>>& accuracies) {
  if (accuracies.size() < 2) throw InputError("ranking needs at least 2 blocks");
  const std::size_t k = accuracies.front().size();
  if (k < 2) throw InputError("ranking needs at least 2 classifiers");
  RankMatrix rm;
  for (const auto& row : accuracies) {
    if (row.size() != k) throw InputError("ragged accuracy matrix");
    for (double v : row) {
      if (std::isnan(v)) throw DataError("accuracy matrix contains NaN");
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    std::vector<double> ranks(k);
    for (std::size_t i = 0; i < k;) {
      std::size_t j = i;
      while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
      const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
      i = j + 1;
    }
    rm.ranks.push_back(std::move(ranks));
  }
  return rm;
}

std::vector<double> average_rank(const RankMatrix& rm) {
  std::vector<double> out(rm.classifiers(), 0.0);
  for (const auto& row : rm.ranks) {
    for (std::size_t j = 0; j < row.size(); ++j) out[j] += row[j];
  }
  for (double& v : out) v /= static_cast<double>(rm.blocks());
  return out;
}

double mean(const std::vector<double>& values) {
  if (values.empty()) return std::nan("");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  double s = 0;
  for (double v : sorted) s += v;
  return s / static_cast<double>(values.size());
}

void sort_runs(std::vector<RunResult>& runs) {
  std::sort(runs.begin(), runs.end(), [](const RunResult& a, const RunResult& b) {
    if (!(a.key == b.key)) return a.key < b.key;
    return a.repetition < b.repetition;
  });
}

void write_runs_csv(std::ostream& out, std::vector<RunResult> runs) {
  sort_runs(runs);
  csv::write_row(out, {"dataset", "window", "scheme", "base", "rep", "accuracy"});
  for (const auto& r : runs) {
    csv::write_row(out, {r.key.dataset, std::to_string(r.key.window), r.key.scheme, r.key.base,
                         std::to_string(r.repetition), csv::fixed(r.accuracy, 6)});
  }
}

namespace {
std::size_t parse_count(const std::string& s, std::size_t line, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) throw RowError(line, std::string("invalid ") + what + " '" + s + "'");
  return static_cast<std::size_t>(v);
}
}  // namespace

std::vector<RunResult> read_runs_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw DataError("accuracy CSV is empty");
  const std::vector<std::string> header{"dataset", "window", "scheme", "base", "rep", "accuracy"};
  if (row != header) throw DataError("accuracy CSV header must be dataset,window,scheme,base,rep,accuracy");
  std::vector<RunResult> runs;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 6) throw RowError(reader.line(), "expected 6 fields");
    RunResult r;
    r.key = RunKey{row[0], parse_count(row[1], reader.line(), "window"), row[2], row[3]};
    r.repetition = parse_count(row[4], reader.line(), "repetition");
    std::size_t pos = 0;
    try {
      r.accuracy = std::stod(row[5], &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != row[5].size() || !(r.accuracy >= 0 && r.accuracy <= 1)) {
      throw RowError(reader.line(), "accuracy must be a number in [0, 1]");
    }
    runs.push_back(std::move(r));
  }
  return runs;
}

std::map<RunKey, double> cell_means(const std::vector<RunResult>& runs) {
  std::map<RunKey, std::vector<double>> acc;
  for (const auto& r : runs) acc[r.key].push_back(r.accuracy);
  std::map<RunKey, double> out;
  for (auto& [k, v] : acc) out[k] = mean(v);
  return out;
}

}  // namespace procbench
