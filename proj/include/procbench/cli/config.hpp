#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "procbench/ensembles/ensembles.hpp"
#include "procbench/evaluation/evaluation.hpp"
#include "procbench/eventlog/readers.hpp"
#include "procbench/eventlog/variability.hpp"
#include "procbench/ml/model.hpp"

namespace procbench {

enum class LogFormat { csv, xes };

struct DatasetConfig {
  std::string name;
  std::filesystem::path path;
  LogFormat format = LogFormat::xes;
  ColumnSpec columns;              // csv only
  std::string timestamp_format = "iso8601";
  bool compose_lifecycle = false;  // xes only; csv composes when columns.lifecycle is set
  DuplicateCases duplicates = DuplicateCases::merge;
};

struct EnsembleSizes {
  std::size_t bagging = 10;
  double bag_fraction = 1.0;
  std::size_t boosting = 10;
  std::size_t subspace_members = 10;
  double subspace_fraction = 0.5;
  std::size_t nested_dichotomies = 10;
  std::size_t dagging = 10;
};

struct BenchmarkConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<std::size_t> window_sizes{3, 4, 5, 6, 7, 8};
  std::vector<Scheme> schemes;
  std::vector<LearnerSpec> base_learners;
  EnsembleSizes ensemble;
  SplitPlan plan;
  std::filesystem::path output_dir = "out";
  std::size_t workers = 1;
  double variability_threshold = kDefaultVariabilityThreshold;
  CoverageRule coverage_rule = CoverageRule::reaches_target;
  double alpha = 0.05;

  const DatasetConfig& dataset(const std::string& name) const;
  EnsembleSpec ensemble_spec(Scheme scheme, const LearnerSpec& base) const;
};

// Relative dataset paths and output_dir resolve against base_dir. Grammar errors and unknown
// keys throw ConfigError; a dataset file that does not exist throws DataError naming it.
BenchmarkConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
BenchmarkConfig load_config(const std::filesystem::path& path);

// Reads the log described by one dataset entry.
EventLog load_dataset(const DatasetConfig& ds);

}  // namespace procbench
