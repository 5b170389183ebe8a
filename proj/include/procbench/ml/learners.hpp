#pragma once

#include <cstdint>

#include "procbench/ml/model.hpp"

namespace procbench {

// C4.5 decision tree. Hyperparameter keys: confidence, min_leaf, prune.
struct C45Params {
  double confidence = 0.25;
  double min_leaf = 2.0;
  bool prune = true;
};

// Random tree. Keys: k (0 = floor(log2 F) + 1), min_leaf, max_depth (0 = unlimited).
struct RandomTreeParams {
  int k = 0;
  double min_leaf = 1.0;
  int max_depth = 0;
};

// Gaussian naive Bayes. Key: variance_floor.
struct NaiveBayesParams {
  double variance_floor = 1e-6;
};

// Keys: k.
struct KnnParams {
  int k = 2;
};

// Keys: min_bucket.
struct OneRParams {
  double min_bucket = 6.0;
};

// Keys: folds (one fold prunes, the rest grow), min_weight, max_antecedents (-1 = unlimited).
struct ConjunctiveRuleParams {
  int folds = 3;
  double min_weight = 2.0;
  int max_antecedents = -1;
};

LearnerPtr make_c45(const C45Params& params);
LearnerPtr make_random_tree(const RandomTreeParams& params);
LearnerPtr make_decision_stump();
LearnerPtr make_naive_bayes(const NaiveBayesParams& params);
LearnerPtr make_knn(const KnnParams& params);
LearnerPtr make_oner(const OneRParams& params);
LearnerPtr make_conjunctive_rule(const ConjunctiveRuleParams& params);

// Registry factories.
LearnerPtr make_c45(const LearnerSpec& spec);
LearnerPtr make_random_tree(const LearnerSpec& spec);
LearnerPtr make_decision_stump(const LearnerSpec& spec);
LearnerPtr make_naive_bayes(const LearnerSpec& spec);
LearnerPtr make_knn(const LearnerSpec& spec);
LearnerPtr make_oner(const LearnerSpec& spec);
LearnerPtr make_conjunctive_rule(const LearnerSpec& spec);

// Pessimistic extra errors for e observed errors among n instances at confidence cf.
double c45_added_errors(double n, double e, double cf);

}  // namespace procbench
