#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "procbench/ml/dataset.hpp"

namespace procbench {

// A fitted classifier. Implementations are immutable after construction, so one model can
// serve predictions from many threads.
class Model {
 public:
  explicit Model(Schema schema) : schema_(std::move(schema)) {}
  virtual ~Model() = default;

  const Schema& schema() const noexcept { return schema_; }
  std::uint32_t num_classes() const noexcept { return schema_.num_classes; }

  // Length num_classes, entries >= 0, sum 1 within 1e-9. Throws InputError on a schema mismatch.
  std::vector<double> predict_proba(FeatureVector x) const;
  // Argmax of predict_proba, lowest code on ties (some models refine tie handling).
  std::uint32_t predict_label(FeatureVector x) const;

  // Unvalidated entry points for ensembles that already checked x.
  virtual void distribution(FeatureVector x, std::span<double> out) const = 0;
  virtual std::uint32_t label(FeatureVector x) const;

 private:
  Schema schema_;
};

using ModelPtr = std::shared_ptr<const Model>;

// Index of the largest entry; the lowest index wins ties.
std::uint32_t argmax(std::span<const double> values);

// Every class gets the same answer.
class ConstantModel final : public Model {
 public:
  ConstantModel(Schema schema, std::vector<double> probabilities);
  void distribution(FeatureVector x, std::span<double> out) const override;

 private:
  std::vector<double> probabilities_;
};

// Named numeric hyperparameters. Booleans are 0/1.
struct LearnerSpec {
  std::string id;
  std::map<std::string, double> params;
};

class Learner {
 public:
  virtual ~Learner() = default;
  // Deterministic in (this, data, seed). data must be non-empty with positive total weight.
  virtual ModelPtr fit(const Dataset& data, std::uint64_t seed) const = 0;
};

using LearnerPtr = std::shared_ptr<const Learner>;
using LearnerFactory = std::function<LearnerPtr(const LearnerSpec&)>;

// Built-in ids: DT RT DS NB KNN ONER CR. Re-registering an id replaces it.
void register_learner(const std::string& id, LearnerFactory factory);
std::vector<std::string> registered_learners();
// Throws ConfigError for an unknown id or invalid hyperparameters.
LearnerPtr make_learner(const LearnerSpec& spec);
ModelPtr fit(const LearnerSpec& spec, const Dataset& data, std::uint64_t seed);

// Reads hyperparameters with defaults; finish() rejects keys that were never read.
class ParamReader {
 public:
  explicit ParamReader(const LearnerSpec& spec) : spec_(spec) {}
  double real(const std::string& key, double fallback, double lo, double hi);
  std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t lo, std::int64_t hi);
  bool flag(const std::string& key, bool fallback);
  void finish() const;

 private:
  const LearnerSpec& spec_;
  std::vector<std::string> used_;
};

// Shared checks before fitting: non-empty data with positive weight.
void require_trainable(const Dataset& data);

}  // namespace procbench
