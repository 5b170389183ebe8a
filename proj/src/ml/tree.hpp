#pragma once

#include <memory>
#include <vector>

#include "procbench/ml/model.hpp"

namespace procbench::detail {

enum class SplitKind : std::uint8_t { leaf, multiway, threshold, equals };

struct TreeNode {
  SplitKind kind = SplitKind::leaf;
  std::uint32_t feature = 0;
  double threshold = 0.0;  // threshold: child 0 takes x <= threshold; equals: child 0 takes x == threshold
  std::vector<double> counts;  // training class weights reaching this node
  double weight = 0.0;
  std::vector<std::unique_ptr<TreeNode>> children;

  bool is_leaf() const noexcept { return kind == SplitKind::leaf; }
  void make_leaf() {
    kind = SplitKind::leaf;
    children.clear();
  }
};

// Descends to the deepest node with training weight; a branch that saw no training
// instances answers with its parent's distribution.
class TreeModel final : public Model {
 public:
  TreeModel(Schema schema, std::unique_ptr<TreeNode> root, std::vector<char> present)
      : Model(std::move(schema)), root_(std::move(root)), present_(std::move(present)) {}

  void distribution(FeatureVector x, std::span<double> out) const override;
  const TreeNode& root() const noexcept { return *root_; }

 private:
  std::unique_ptr<TreeNode> root_;
  std::vector<char> present_;
};

std::size_t count_leaves(const TreeNode& node);
std::size_t count_nodes(const TreeNode& node);

// Class weights of the listed rows.
std::vector<double> class_counts(const Dataset& data, std::span<const std::size_t> rows);

// Best binary threshold on a numeric feature by information gain. rows must already be
// sorted by that feature. Candidates sit between values more than gap apart and need at
// least min_side weight on both sides.
struct ThresholdSplit {
  bool valid = false;
  double gain = 0.0;  // bits
  double threshold = 0.0;
  std::size_t candidates = 0;
  std::size_t left_rows = 0;  // rows at or below the threshold
};
ThresholdSplit best_threshold(const Dataset& data, std::span<const std::size_t> sorted_rows,
                              std::uint32_t feature, std::span<const double> parent_counts,
                              double min_side, double gap);

void sort_rows_by(const Dataset& data, std::vector<std::size_t>& rows, std::uint32_t feature);

}  // namespace procbench::detail
