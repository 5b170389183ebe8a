#include "procbench/ml/dataset.hpp"

#include <cmath>

#include "procbench/encoding/encoding.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

void validate_features(const Schema& schema, FeatureVector x) {
  if (x.size() != schema.size()) {
    throw InputError("feature vector has " + std::to_string(x.size()) + " values, schema expects " +
                     std::to_string(schema.size()));
  }
  for (std::size_t f = 0; f < x.size(); ++f) {
    const double v = x[f];
    if (!std::isfinite(v)) throw InputError("feature " + std::to_string(f) + " is not finite");
    const Feature& spec = schema.features[f];
    if (spec.kind == FeatureKind::nominal &&
        (v < 0 || v >= spec.arity || v != std::floor(v))) {
      throw InputError("feature " + std::to_string(f) + " value " + std::to_string(v) +
                       " is not a code below " + std::to_string(spec.arity));
    }
  }
}

Dataset::Dataset(Schema schema) : schema_(std::move(schema)) {
  if (schema_.num_classes == 0) throw ConfigError("schema needs at least one class");
}

void Dataset::reserve(std::size_t n) {
  values_.reserve(n * schema_.size());
  labels_.reserve(n);
  weights_.reserve(n);
}

void Dataset::add(FeatureVector x, std::uint32_t label, double weight) {
  validate_features(schema_, x);
  if (label >= schema_.num_classes) throw InputError("label " + std::to_string(label) + " out of range");
  if (!std::isfinite(weight) || weight < 0) throw InputError("instance weight must be finite and >= 0");
  values_.insert(values_.end(), x.begin(), x.end());
  labels_.push_back(label);
  weights_.push_back(weight);
}

void Dataset::set_weight(std::size_t i, double w) {
  if (!std::isfinite(w) || w < 0) throw InputError("instance weight must be finite and >= 0");
  weights_.at(i) = w;
}

void Dataset::set_label(std::size_t i, std::uint32_t label) {
  if (label >= schema_.num_classes) throw InputError("label out of range");
  labels_.at(i) = label;
}

double Dataset::total_weight() const {
  double s = 0;
  for (double w : weights_) s += w;
  return s;
}

std::vector<double> Dataset::class_weights() const {
  std::vector<double> out(schema_.num_classes, 0.0);
  for (std::size_t i = 0; i < labels_.size(); ++i) out[labels_[i]] += weights_[i];
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out(schema_);
  out.reserve(indices.size());
  const std::size_t f = schema_.size();
  for (std::size_t i : indices) {
    if (i >= size()) throw InternalError("subset index out of range");
    out.values_.insert(out.values_.end(), values_.begin() + i * f, values_.begin() + (i + 1) * f);
    out.labels_.push_back(labels_[i]);
    out.weights_.push_back(weights_[i]);
  }
  return out;
}

Dataset Dataset::project(std::span<const std::size_t> features) const {
  Schema s;
  s.num_classes = schema_.num_classes;
  for (std::size_t f : features) {
    if (f >= schema_.size()) throw InternalError("projected feature out of range");
    s.features.push_back(schema_.features[f]);
  }
  Dataset out(std::move(s));
  out.values_.reserve(size() * features.size());
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t f : features) out.values_.push_back(value(i, f));
  }
  out.labels_ = labels_;
  out.weights_ = weights_;
  return out;
}

Dataset Dataset::relabel(std::span<const std::uint32_t> map, std::uint32_t num_classes) const {
  if (map.size() != schema_.num_classes) throw InternalError("relabel map has the wrong length");
  Schema s = schema_;
  s.num_classes = num_classes;
  Dataset out(std::move(s));
  out.values_ = values_;
  out.weights_ = weights_;
  out.labels_.reserve(labels_.size());
  for (std::uint32_t y : labels_) {
    if (map[y] >= num_classes) throw InternalError("relabel target out of range");
    out.labels_.push_back(map[y]);
  }
  return out;
}

Schema encoded_schema(const EncodedDataset& data) {
  Schema s;
  const auto arity = static_cast<std::uint32_t>(data.code_map.size());
  for (std::size_t j = 1; j <= data.window_size; ++j) {
    s.features.push_back(Feature{FeatureKind::nominal, arity, "event_" + std::to_string(j)});
  }
  s.features.push_back(Feature{FeatureKind::numeric, 0, "duration"});
  s.num_classes = arity;
  return s;
}

Dataset to_dataset(const EncodedDataset& data) {
  Dataset out(encoded_schema(data));
  out.reserve(data.samples.size());
  std::vector<double> x(data.window_size + 1);
  for (const Sample& s : data.samples) {
    for (std::size_t j = 0; j < data.window_size; ++j) x[j] = s.type_codes[j];
    x[data.window_size] = s.duration;
    out.add(x, s.label_code);
  }
  return out;
}

}  // namespace procbench
