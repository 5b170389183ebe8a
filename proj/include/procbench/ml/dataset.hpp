#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace procbench {

struct EncodedDataset;

enum class FeatureKind : std::uint8_t { nominal, numeric };

struct Feature {
  FeatureKind kind = FeatureKind::numeric;
  std::uint32_t arity = 0;  // nominal only: values are codes 0..arity-1
  std::string name;

  bool operator==(const Feature&) const = default;
};

struct Schema {
  std::vector<Feature> features;
  std::uint32_t num_classes = 0;

  std::size_t size() const noexcept { return features.size(); }
  bool operator==(const Schema&) const = default;
};

using FeatureVector = std::span<const double>;

// Throws InputError when x does not match the schema (length, nominal code range, NaN).
void validate_features(const Schema& schema, FeatureVector x);

// Dense row-major training data with per-instance weights.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(Schema schema);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t num_features() const noexcept { return schema_.size(); }
  std::uint32_t num_classes() const noexcept { return schema_.num_classes; }

  FeatureVector row(std::size_t i) const {
    return {values_.data() + i * schema_.size(), schema_.size()};
  }
  double value(std::size_t i, std::size_t f) const { return values_[i * schema_.size() + f]; }
  std::uint32_t label(std::size_t i) const { return labels_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<std::uint32_t>& labels() const noexcept { return labels_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  void reserve(std::size_t n);
  // Validates the row, the label and a finite non-negative weight.
  void add(FeatureVector x, std::uint32_t label, double weight = 1.0);
  void set_weight(std::size_t i, double w);
  void set_label(std::size_t i, std::uint32_t label);

  double total_weight() const;
  // Weight per class, length num_classes.
  std::vector<double> class_weights() const;

  // Rows in the given order; indices may repeat.
  Dataset subset(std::span<const std::size_t> indices) const;
  // Keeps only the listed feature columns, in that order.
  Dataset project(std::span<const std::size_t> features) const;
  // Same rows relabelled through map (old label -> new label) under a new class count.
  Dataset relabel(std::span<const std::uint32_t> map, std::uint32_t num_classes) const;

 private:
  Schema schema_;
  std::vector<double> values_;
  std::vector<std::uint32_t> labels_;
  std::vector<double> weights_;
};

// l nominal event-type features (arity = alphabet size) followed by the numeric duration.
Schema encoded_schema(const EncodedDataset& data);
Dataset to_dataset(const EncodedDataset& data);

}  // namespace procbench
