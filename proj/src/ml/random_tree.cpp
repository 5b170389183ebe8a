#include <cmath>
#include <numeric>

#include "common.hpp"
#include "procbench/ml/learners.hpp"
#include "procbench/util/errors.hpp"
#include "procbench/util/rng.hpp"
#include "tree.hpp"

namespace procbench {
namespace {

using detail::SplitKind;
using detail::TreeNode;

class RandomTreeBuilder {
 public:
  RandomTreeBuilder(const Dataset& data, const RandomTreeParams& p, std::uint64_t seed)
      : data_(data), p_(p), rng_(seed) {
    const std::size_t f = data.num_features();
    k_ = p.k > 0 ? static_cast<std::size_t>(p.k)
                 : static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(f)))) + 1;
    k_ = std::min(k_, f);
  }

  std::unique_ptr<TreeNode> build(std::vector<std::size_t> rows, int depth) {
    auto node = std::make_unique<TreeNode>();
    node->counts = detail::class_counts(data_, rows);
    node->weight = detail::sum(node->counts);
    if (rows.empty()) return node;
    if (node->weight < 2 * p_.min_leaf || detail::max_of(node->counts) >= node->weight - 1e-9) return node;
    if (p_.max_depth > 0 && depth >= p_.max_depth) return node;

    // Draw attributes without replacement until k are examined and one has positive gain.
    std::vector<std::uint32_t> window(data_.num_features());
    std::iota(window.begin(), window.end(), 0u);
    std::size_t size = window.size();
    std::size_t budget = k_;
    bool gain_found = false;
    double best_gain = 0;
    std::uint32_t best_feature = 0;
    double best_threshold = 0;
    bool have_best = false;
    std::vector<std::size_t> scratch;
    while (size > 0 && (budget > 0 || !gain_found)) {
      if (budget > 0) --budget;
      const std::size_t pick = rng_.index(size);
      const std::uint32_t f = window[pick];
      std::swap(window[pick], window[size - 1]);
      --size;
      double gain = 0;
      double threshold = 0;
      if (data_.schema().features[f].kind == FeatureKind::nominal) {
        gain = nominal_gain(rows, f, node->counts);
      } else {
        scratch.assign(rows.begin(), rows.end());
        detail::sort_rows_by(data_, scratch, f);
        const auto t = detail::best_threshold(data_, scratch, f, node->counts, 0.0, 0.0);
        if (t.valid) {
          gain = t.gain;
          threshold = t.threshold;
        }
      }
      if (gain > 1e-10) gain_found = true;
      if (!have_best || gain > best_gain || (gain == best_gain && f < best_feature)) {
        have_best = true;
        best_gain = gain;
        best_feature = f;
        best_threshold = threshold;
      }
    }
    if (!have_best || best_gain <= 1e-10) return node;

    const Feature& feat = data_.schema().features[best_feature];
    node->feature = best_feature;
    node->kind = feat.kind == FeatureKind::nominal ? SplitKind::multiway : SplitKind::threshold;
    node->threshold = best_threshold;
    std::vector<std::vector<std::size_t>> parts(node->kind == SplitKind::multiway ? feat.arity : 2);
    for (std::size_t r : rows) {
      const double v = data_.value(r, best_feature);
      parts[node->kind == SplitKind::multiway ? static_cast<std::size_t>(v) : (v <= best_threshold ? 0 : 1)]
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    for (auto& part : parts) node->children.push_back(build(std::move(part), depth + 1));
    return node;
  }

 private:
  double nominal_gain(std::span<const std::size_t> rows, std::uint32_t f, std::span<const double> counts) const {
    const std::uint32_t arity = data_.schema().features[f].arity;
    const std::uint32_t k = data_.num_classes();
    std::vector<double> bags(static_cast<std::size_t>(arity) * k, 0.0);
    for (std::size_t r : rows) {
      bags[static_cast<std::size_t>(data_.value(r, f)) * k + data_.label(r)] += data_.weight(r);
    }
    double new_ent = 0;
    for (std::uint32_t v = 0; v < arity; ++v) {
      new_ent += detail::weighted_entropy(std::span<const double>(bags.data() + static_cast<std::size_t>(v) * k, k));
    }
    return (detail::weighted_entropy(counts) - new_ent) / detail::sum(counts);
  }

  const Dataset& data_;
  RandomTreeParams p_;
  Rng rng_;
  std::size_t k_ = 1;
};

class RandomTree final : public Learner {
 public:
  explicit RandomTree(const RandomTreeParams& p) : p_(p) {
    if (p_.k < 0) throw ConfigError("RT k must be >= 0");
    if (!(p_.min_leaf > 0)) throw ConfigError("RT min_leaf must be positive");
    if (p_.max_depth < 0) throw ConfigError("RT max_depth must be >= 0");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t seed) const override {
    require_trainable(data);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) > 0) rows.push_back(i);
    }
    auto root = RandomTreeBuilder(data, p_, seed).build(std::move(rows), 0);
    auto present = detail::present_classes(root->counts);
    return std::make_shared<detail::TreeModel>(data.schema(), std::move(root), std::move(present));
  }

 private:
  RandomTreeParams p_;
};

}  // namespace

LearnerPtr make_random_tree(const RandomTreeParams& params) { return std::make_shared<RandomTree>(params); }

LearnerPtr make_random_tree(const LearnerSpec& spec) {
  ParamReader r(spec);
  RandomTreeParams p;
  p.k = static_cast<int>(r.integer("k", p.k, 0, 1 << 20));
  p.min_leaf = r.real("min_leaf", p.min_leaf, 1e-6, 1e9);
  p.max_depth = static_cast<int>(r.integer("max_depth", p.max_depth, 0, 1 << 20));
  r.finish();
  return make_random_tree(p);
}

}  // namespace procbench
