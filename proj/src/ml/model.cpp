#include "procbench/ml/model.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "procbench/ml/learners.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

std::uint32_t argmax(std::span<const double> values) {
  std::uint32_t best = 0;
  for (std::uint32_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<double> Model::predict_proba(FeatureVector x) const {
  validate_features(schema_, x);
  std::vector<double> p(num_classes(), 0.0);
  distribution(x, p);
  double sum = 0;
  for (double v : p) {
    if (!(v >= 0) || !std::isfinite(v)) throw InternalError("model produced an invalid probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InternalError("model probabilities sum to " + std::to_string(sum));
  return p;
}

std::uint32_t Model::predict_label(FeatureVector x) const {
  validate_features(schema_, x);
  return label(x);
}

std::uint32_t Model::label(FeatureVector x) const {
  std::vector<double> p(num_classes(), 0.0);
  distribution(x, p);
  return argmax(p);
}

ConstantModel::ConstantModel(Schema schema, std::vector<double> probabilities)
    : Model(std::move(schema)), probabilities_(std::move(probabilities)) {
  if (probabilities_.size() != num_classes()) throw InternalError("constant model arity mismatch");
}

void ConstantModel::distribution(FeatureVector, std::span<double> out) const {
  std::copy(probabilities_.begin(), probabilities_.end(), out.begin());
}

namespace {

struct Registry {
  std::mutex mutex;
  std::map<std::string, LearnerFactory> factories;
};

template <LearnerPtr (*Make)(const LearnerSpec&)>
LearnerPtr from_spec(const LearnerSpec& spec) {
  return Make(spec);
}

Registry& registry() {
  static Registry r;
  static std::once_flag builtins;
  std::call_once(builtins, [] {
    r.factories["DT"] = from_spec<make_c45>;
    r.factories["RT"] = from_spec<make_random_tree>;
    r.factories["DS"] = from_spec<make_decision_stump>;
    r.factories["NB"] = from_spec<make_naive_bayes>;
    r.factories["KNN"] = from_spec<make_knn>;
    r.factories["ONER"] = from_spec<make_oner>;
    r.factories["CR"] = from_spec<make_conjunctive_rule>;
  });
  return r;
}

}  // namespace

void register_learner(const std::string& id, LearnerFactory factory) {
  if (id.empty() || !factory) throw ConfigError("learner registration needs an id and a factory");
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  r.factories[id] = std::move(factory);
}

std::vector<std::string> registered_learners() {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  std::vector<std::string> ids;
  for (const auto& [id, f] : r.factories) ids.push_back(id);
  return ids;
}

LearnerPtr make_learner(const LearnerSpec& spec) {
  LearnerFactory factory;
  {
    auto& r = registry();
    std::lock_guard lock(r.mutex);
    auto it = r.factories.find(spec.id);
    if (it == r.factories.end()) throw ConfigError("unknown learner '" + spec.id + "'");
    factory = it->second;
  }
  return factory(spec);
}

ModelPtr fit(const LearnerSpec& spec, const Dataset& data, std::uint64_t seed) {
  return make_learner(spec)->fit(data, seed);
}

double ParamReader::real(const std::string& key, double fallback, double lo, double hi) {
  used_.push_back(key);
  auto it = spec_.params.find(key);
  if (it == spec_.params.end()) return fallback;
  const double v = it->second;
  if (!(v >= lo && v <= hi)) {
    throw ConfigError(spec_.id + "." + key + " = " + std::to_string(v) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

std::int64_t ParamReader::integer(const std::string& key, std::int64_t fallback, std::int64_t lo,
                                  std::int64_t hi) {
  const double v = real(key, static_cast<double>(fallback), static_cast<double>(lo), static_cast<double>(hi));
  if (v != std::floor(v)) throw ConfigError(spec_.id + "." + key + " must be an integer");
  return static_cast<std::int64_t>(v);
}

bool ParamReader::flag(const std::string& key, bool fallback) {
  const double v = real(key, fallback ? 1.0 : 0.0, 0.0, 1.0);
  if (v != 0.0 && v != 1.0) throw ConfigError(spec_.id + "." + key + " must be 0 or 1");
  return v == 1.0;
}

void ParamReader::finish() const {
  for (const auto& [key, value] : spec_.params) {
    if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
      throw ConfigError("unknown hyperparameter '" + key + "' for learner " + spec_.id);
    }
  }
}

void require_trainable(const Dataset& data) {
  if (data.empty()) throw InputError("cannot fit on an empty dataset");
  if (!(data.total_weight() > 0)) throw InputError("training weights sum to zero");
}

}  // namespace procbench
