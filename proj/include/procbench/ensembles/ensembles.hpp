#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "procbench/ml/model.hpp"

namespace procbench {

enum class Scheme { Individual, Bagging, Boosting, RandomSubspace, NestedDichotomies, Dagging };

std::string to_string(Scheme s);
// Accepts the names produced by to_string; throws ConfigError otherwise.
Scheme parse_scheme(const std::string& name);

struct EnsembleSpec {
  Scheme scheme = Scheme::Individual;
  LearnerSpec base;
  std::size_t members = 10;   // bags, boosting rounds, subspace members, trees or folds
  double sample_frac = 1.0;   // bagging
  double subspace = 0.5;      // random subspace feature fraction
};

LearnerPtr make_bagging(LearnerPtr base, std::size_t bags = 10, double sample_frac = 1.0);
LearnerPtr make_adaboost_m1(LearnerPtr base, std::size_t rounds = 10);
LearnerPtr make_random_subspace(LearnerPtr base, double fraction = 0.5, std::size_t members = 10);
LearnerPtr make_nested_dichotomies(LearnerPtr base, std::size_t trees = 10);
LearnerPtr make_dagging(LearnerPtr base, std::size_t folds = 10);

// Individual returns the base learner itself.
LearnerPtr make_ensemble(const EnsembleSpec& spec);

// Weighted vote over member labels; probabilities are the normalised vote mass, ties go to
// the lowest code. A dominant member, when set, decides alone.
class VoteModel final : public Model {
 public:
  VoteModel(Schema schema, std::vector<ModelPtr> members, std::vector<double> weights,
            std::optional<std::size_t> dominant = std::nullopt);
  void distribution(FeatureVector x, std::span<double> out) const override;
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<ModelPtr>& members() const noexcept { return members_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::optional<std::size_t>& dominant() const noexcept { return dominant_; }

 private:
  std::vector<ModelPtr> members_;
  std::vector<double> weights_;
  std::optional<std::size_t> dominant_;
};

// Mean of member distributions.
class AverageModel final : public Model {
 public:
  AverageModel(Schema schema, std::vector<ModelPtr> members);
  void distribution(FeatureVector x, std::span<double> out) const override;
  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<ModelPtr>& members() const noexcept { return members_; }

 private:
  std::vector<ModelPtr> members_;
};

// A model trained on a subset of the features, applied to full-width inputs.
class ProjectedModel final : public Model {
 public:
  ProjectedModel(Schema full, std::vector<std::size_t> features, ModelPtr inner);
  void distribution(FeatureVector x, std::span<double> out) const override;
  std::uint32_t label(FeatureVector x) const override;
  const std::vector<std::size_t>& features() const noexcept { return features_; }

 private:
  std::vector<std::size_t> features_;
  ModelPtr inner_;
};

// One random nested dichotomy: internal nodes split a label set in two and hold a binary
// model whose class 0 is the first side.
struct DichotomyNode {
  std::vector<std::uint32_t> labels;
  ModelPtr model;    // null at leaves
  int first = -1;    // child indices into the node array
  int second = -1;
};

struct DichotomyTree {
  std::vector<DichotomyNode> nodes;  // nodes[0] is the root

  std::size_t internal_nodes() const;
  // Product of branch probabilities from the root to every leaf; length num_classes.
  void distribution(FeatureVector x, std::span<double> out) const;
};

class NestedDichotomiesModel final : public Model {
 public:
  NestedDichotomiesModel(Schema schema, std::vector<DichotomyTree> trees);
  void distribution(FeatureVector x, std::span<double> out) const override;
  const std::vector<DichotomyTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<DichotomyTree> trees_;
};

// Instance weights after a boosting round: correct instances scaled by e/(1-e), then
// normalised to the previous total.
std::vector<double> boost_reweight(std::span<const double> weights, std::span<const char> correct, double error);

// Fold sizes for splitting n rows into m folds, larger folds first.
std::vector<std::size_t> dagging_folds(std::size_t n, std::size_t m);

}  // namespace procbench
