#include "common.hpp"
#include "procbench/ml/learners.hpp"
#include "tree.hpp"

namespace procbench {
namespace {

using detail::SplitKind;
using detail::TreeNode;

class DecisionStump final : public Learner {
 public:
  ModelPtr fit(const Dataset& data, std::uint64_t) const override {
    require_trainable(data);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) > 0) rows.push_back(i);
    }
    auto root = std::make_unique<TreeNode>();
    root->counts = detail::class_counts(data, rows);
    root->weight = detail::sum(root->counts);
    const double parent_ent = detail::weighted_entropy(root->counts);
    const std::uint32_t k = data.num_classes();

    bool found = false;
    double best_gain = 0;
    std::uint32_t best_feature = 0;
    SplitKind best_kind = SplitKind::leaf;
    double best_value = 0;
    std::vector<std::size_t> sorted;
    for (std::uint32_t f = 0; f < data.num_features(); ++f) {
      const Feature& feat = data.schema().features[f];
      if (feat.kind == FeatureKind::nominal) {
        std::vector<double> bags(static_cast<std::size_t>(feat.arity) * k, 0.0);
        for (std::size_t r : rows) bags[static_cast<std::size_t>(data.value(r, f)) * k + data.label(r)] += data.weight(r);
        for (std::uint32_t v = 0; v < feat.arity; ++v) {
          std::span<const double> in(bags.data() + static_cast<std::size_t>(v) * k, k);
          const double w_in = detail::sum(in);
          if (w_in <= 0 || w_in >= root->weight - 1e-9) continue;
          std::vector<double> out(root->counts);
          for (std::uint32_t c = 0; c < k; ++c) out[c] -= in[c];
          const double gain = (parent_ent - detail::weighted_entropy(in) - detail::weighted_entropy(out)) / root->weight;
          if (!found || gain > best_gain + 1e-12) {
            found = true;
            best_gain = gain;
            best_feature = f;
            best_kind = SplitKind::equals;
            best_value = v;
          }
        }
      } else {
        sorted = rows;
        detail::sort_rows_by(data, sorted, f);
        const auto t = detail::best_threshold(data, sorted, f, root->counts, 0.0, 0.0);
        if (t.valid && (!found || t.gain > best_gain + 1e-12)) {
          found = true;
          best_gain = t.gain;
          best_feature = f;
          best_kind = SplitKind::threshold;
          best_value = t.threshold;
        }
      }
    }
    if (found) {
      root->kind = best_kind;
      root->feature = best_feature;
      root->threshold = best_value;
      for (int side = 0; side < 2; ++side) {
        auto child = std::make_unique<TreeNode>();
        child->counts.assign(k, 0.0);
        root->children.push_back(std::move(child));
      }
      for (std::size_t r : rows) {
        const double v = data.value(r, best_feature);
        const bool first = best_kind == SplitKind::equals ? v == best_value : v <= best_value;
        TreeNode& child = *root->children[first ? 0 : 1];
        child.counts[data.label(r)] += data.weight(r);
        child.weight += data.weight(r);
      }
    }
    auto present = detail::present_classes(root->counts);
    return std::make_shared<detail::TreeModel>(data.schema(), std::move(root), std::move(present));
  }
};

}  // namespace

LearnerPtr make_decision_stump() { return std::make_shared<DecisionStump>(); }

LearnerPtr make_decision_stump(const LearnerSpec& spec) {
  ParamReader(spec).finish();
  return make_decision_stump();
}

}  // namespace procbench
