#include "tree.hpp"

#include <algorithm>

#include "common.hpp"

namespace procbench::detail {

void TreeModel::distribution(FeatureVector x, std::span<double> out) const {
  const TreeNode* node = root_.get();
  while (!node->is_leaf()) {
    const double v = x[node->feature];
    const TreeNode* next = nullptr;
    switch (node->kind) {
      case SplitKind::multiway: {
        const auto branch = static_cast<std::size_t>(v);
        if (branch < node->children.size()) next = node->children[branch].get();
        break;
      }
      case SplitKind::threshold:
        next = node->children[v <= node->threshold ? 0 : 1].get();
        break;
      case SplitKind::equals:
        next = node->children[v == node->threshold ? 0 : 1].get();
        break;
      case SplitKind::leaf:
        break;
    }
    if (!next || next->weight <= 0) break;
    node = next;
  }
  laplace(node->counts, present_, out);
}

std::size_t count_leaves(const TreeNode& node) {
  if (node.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : node.children) n += count_leaves(*c);
  return n;
}

std::size_t count_nodes(const TreeNode& node) {
  std::size_t n = 1;
  for (const auto& c : node.children) n += count_nodes(*c);
  return n;
}

std::vector<double> class_counts(const Dataset& data, std::span<const std::size_t> rows) {
  std::vector<double> counts(data.num_classes(), 0.0);
  for (std::size_t r : rows) counts[data.label(r)] += data.weight(r);
  return counts;
}

void sort_rows_by(const Dataset& data, std::vector<std::size_t>& rows, std::uint32_t feature) {
  std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    return data.value(a, feature) < data.value(b, feature);
  });
}

ThresholdSplit best_threshold(const Dataset& data, std::span<const std::size_t> sorted_rows,
                              std::uint32_t feature, std::span<const double> parent_counts,
                              double min_side, double gap) {
  ThresholdSplit best;
  const double total = sum(parent_counts);
  if (sorted_rows.size() < 2 || total <= 0) return best;
  const double parent_ent = weighted_entropy(parent_counts);
  std::vector<double> left(parent_counts.size(), 0.0);
  std::vector<double> right(parent_counts.begin(), parent_counts.end());
  double left_w = 0;
  for (std::size_t i = 0; i + 1 < sorted_rows.size(); ++i) {
    const std::size_t r = sorted_rows[i];
    const double w = data.weight(r);
    left[data.label(r)] += w;
    right[data.label(r)] -= w;
    left_w += w;
    const double v = data.value(r, feature);
    const double next = data.value(sorted_rows[i + 1], feature);
    if (!(v + gap < next)) continue;
    const double right_w = total - left_w;
    if (left_w < min_side - 1e-9 || right_w < min_side - 1e-9) continue;
    ++best.candidates;
    const double gain = (parent_ent - weighted_entropy(left) - weighted_entropy(right)) / total;
    if (!best.valid || gain > best.gain + 1e-12) {
      best.valid = true;
      best.gain = gain;
      best.threshold = v + (next - v) / 2;
      if (!(best.threshold < next)) best.threshold = v;
      best.left_rows = i + 1;
    }
  }
  return best;
}

}  // namespace procbench::detail
