#include "procbench/ensembles/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

#include "procbench/util/errors.hpp"
#include "procbench/util/rng.hpp"

namespace procbench {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Individual: return "Individual";
    case Scheme::Bagging: return "Bagging";
    case Scheme::Boosting: return "Boosting";
    case Scheme::RandomSubspace: return "RandomSubspace";
    case Scheme::NestedDichotomies: return "NestedDichotomies";
    case Scheme::Dagging: return "Dagging";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::Individual, Scheme::Bagging, Scheme::Boosting, Scheme::RandomSubspace,
                   Scheme::NestedDichotomies, Scheme::Dagging}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown scheme '" + name + "'");
}

namespace {

// Sums each column in ascending order so the result does not depend on member order.
void sorted_column_sums(std::vector<std::vector<double>>& columns, std::span<double> out) {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::sort(columns[c].begin(), columns[c].end());
    double s = 0;
    for (double v : columns[c]) s += v;
    out[c] = s;
  }
}

std::vector<std::size_t> positive_rows(const Dataset& data) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.weight(i) > 0) rows.push_back(i);
  }
  return rows;
}

ModelPtr constant_for(const Dataset& data, std::uint32_t cls) {
  std::vector<double> p(data.num_classes(), 0.0);
  p[cls] = 1.0;
  return std::make_shared<ConstantModel>(data.schema(), std::move(p));
}

}  // namespace

VoteModel::VoteModel(Schema schema, std::vector<ModelPtr> members, std::vector<double> weights,
                     std::optional<std::size_t> dominant)
    : Model(std::move(schema)), members_(std::move(members)), weights_(std::move(weights)), dominant_(dominant) {
  if (members_.empty() || members_.size() != weights_.size()) throw InternalError("vote needs one weight per member");
  if (dominant_ && *dominant_ >= members_.size()) throw InternalError("dominant member out of range");
  for (double w : weights_) {
    if (!(w > 0) || !std::isfinite(w)) throw InternalError("vote weights must be positive and finite");
  }
}

void VoteModel::distribution(FeatureVector x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (dominant_) {
    out[members_[*dominant_]->label(x)] = 1.0;
    return;
  }
  std::vector<std::vector<double>> votes(num_classes());
  for (std::size_t m = 0; m < members_.size(); ++m) votes[members_[m]->label(x)].push_back(weights_[m]);
  sorted_column_sums(votes, out);
  double total = 0;
  for (double v : out) total += v;
  for (double& v : out) v /= total;
}

AverageModel::AverageModel(Schema schema, std::vector<ModelPtr> members)
    : Model(std::move(schema)), members_(std::move(members)) {
  if (members_.empty()) throw InternalError("average needs at least one member");
}

void AverageModel::distribution(FeatureVector x, std::span<double> out) const {
  const std::uint32_t k = num_classes();
  std::vector<std::vector<double>> cols(k);
  std::vector<double> p(k);
  for (const auto& m : members_) {
    std::fill(p.begin(), p.end(), 0.0);
    m->distribution(x, p);
    for (std::uint32_t c = 0; c < k; ++c) cols[c].push_back(p[c]);
  }
  sorted_column_sums(cols, out);
  for (double& v : out) v /= static_cast<double>(members_.size());
}

ProjectedModel::ProjectedModel(Schema full, std::vector<std::size_t> features, ModelPtr inner)
    : Model(std::move(full)), features_(std::move(features)), inner_(std::move(inner)) {}

void ProjectedModel::distribution(FeatureVector x, std::span<double> out) const {
  std::vector<double> sub(features_.size());
  for (std::size_t j = 0; j < features_.size(); ++j) sub[j] = x[features_[j]];
  inner_->distribution(sub, out);
}

std::uint32_t ProjectedModel::label(FeatureVector x) const {
  std::vector<double> sub(features_.size());
  for (std::size_t j = 0; j < features_.size(); ++j) sub[j] = x[features_[j]];
  return inner_->label(sub);
}

std::size_t DichotomyTree::internal_nodes() const {
  std::size_t n = 0;
  for (const auto& node : nodes) n += node.model != nullptr;
  return n;
}

void DichotomyTree::distribution(FeatureVector x, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  // (node, probability of reaching it)
  std::vector<std::pair<int, double>> stack{{0, 1.0}};
  double p[2];
  while (!stack.empty()) {
    const auto [id, mass] = stack.back();
    stack.pop_back();
    const DichotomyNode& n = nodes[static_cast<std::size_t>(id)];
    if (!n.model) {
      out[n.labels.front()] = mass;
      continue;
    }
    p[0] = p[1] = 0;
    n.model->distribution(x, std::span<double>(p, 2));
    stack.emplace_back(n.first, mass * p[0]);
    stack.emplace_back(n.second, mass * p[1]);
  }
}

NestedDichotomiesModel::NestedDichotomiesModel(Schema schema, std::vector<DichotomyTree> trees)
    : Model(std::move(schema)), trees_(std::move(trees)) {
  if (trees_.empty()) throw InternalError("nested dichotomies need at least one tree");
}

void NestedDichotomiesModel::distribution(FeatureVector x, std::span<double> out) const {
  const std::uint32_t k = num_classes();
  std::vector<std::vector<double>> cols(k);
  std::vector<double> p(k);
  for (const auto& t : trees_) {
    t.distribution(x, p);
    for (std::uint32_t c = 0; c < k; ++c) cols[c].push_back(p[c]);
  }
  sorted_column_sums(cols, out);
  double total = 0;
  for (double& v : out) {
    v /= static_cast<double>(trees_.size());
    total += v;
  }
  // Each tree sums to one up to rounding; renormalise the mean.
  for (double& v : out) v /= total;
}

std::vector<double> boost_reweight(std::span<const double> weights, std::span<const char> correct, double error) {
  if (weights.size() != correct.size()) throw InternalError("reweight length mismatch");
  if (!(error > 0 && error < 0.5)) throw InternalError("reweight needs 0 < error < 0.5");
  const double factor = error / (1 - error);
  double before = 0, after = 0;
  std::vector<double> out(weights.begin(), weights.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    before += out[i];
    if (correct[i]) out[i] *= factor;
    after += out[i];
  }
  for (double& w : out) w *= before / after;
  return out;
}

std::vector<std::size_t> dagging_folds(std::size_t n, std::size_t m) {
  if (m == 0) throw ConfigError("fold count must be at least 1");
  if (n < m) throw ConfigError("dataset smaller than fold count (" + std::to_string(n) + " < " + std::to_string(m) + ")");
  std::vector<std::size_t> sizes(m, n / m);
  for (std::size_t i = 0; i < n % m; ++i) ++sizes[i];
  return sizes;
}

namespace {

class Bagging final : public Learner {
 public:
  Bagging(LearnerPtr base, std::size_t bags, double frac) : base_(std::move(base)), bags_(bags), frac_(frac) {
    if (bags_ < 1) throw ConfigError("bagging needs at least one bag");
    if (!(frac_ > 0 && frac_ <= 1)) throw ConfigError("bagging sample fraction must lie in (0, 1]");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t seed) const override {
    require_trainable(data);
    const auto pool = positive_rows(data);
    const auto draws = static_cast<std::size_t>(std::ceil(frac_ * static_cast<double>(pool.size())));
    std::vector<ModelPtr> members;
    for (std::size_t b = 0; b < bags_; ++b) {
      Rng rng(derive_seed(seed, 2 * b));
      std::vector<std::size_t> sample(draws);
      for (auto& s : sample) s = pool[rng.index(pool.size())];
      members.push_back(base_->fit(data.subset(sample), derive_seed(seed, 2 * b + 1)));
    }
    return std::make_shared<VoteModel>(data.schema(), std::move(members), std::vector<double>(bags_, 1.0));
  }

 private:
  LearnerPtr base_;
  std::size_t bags_;
  double frac_;
};

class AdaBoostM1 final : public Learner {
 public:
  AdaBoostM1(LearnerPtr base, std::size_t rounds) : base_(std::move(base)), rounds_(rounds) {
    if (rounds_ < 1) throw ConfigError("boosting needs at least one round");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t seed) const override {
    require_trainable(data);
    const std::size_t n = data.size();
    std::vector<double> w(data.weights());
    std::vector<ModelPtr> members;
    std::vector<double> votes;
    std::optional<std::size_t> dominant;
    std::vector<char> correct(n);
    std::vector<double> cumulative(n);
    for (std::size_t r = 0; r < rounds_; ++r) {
      // Weighted resample of n rows.
      std::partial_sum(w.begin(), w.end(), cumulative.begin());
      const double total = cumulative.back();
      Rng rng(derive_seed(seed, 2 * r));
      std::vector<std::size_t> sample(n);
      for (auto& s : sample) {
        const double u = rng.uniform() * total;
        s = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        s = std::min(s, n - 1);
        while (w[s] <= 0 && s + 1 < n) ++s;
      }
      Dataset resampled = data.subset(sample);
      for (std::size_t i = 0; i < resampled.size(); ++i) resampled.set_weight(i, 1.0);
      ModelPtr m = base_->fit(resampled, derive_seed(seed, 2 * r + 1));

      double err = 0;
      for (std::size_t i = 0; i < n; ++i) {
        correct[i] = m->label(data.row(i)) == data.label(i);
        if (!correct[i]) err += w[i];
      }
      err /= total;
      if (err >= 0.5) break;
      if (err <= 0) {
        dominant = members.size();
        members.push_back(std::move(m));
        votes.push_back(1.0);
        break;
      }
      members.push_back(std::move(m));
      votes.push_back(std::log((1 - err) / err));
      w = boost_reweight(w, correct, err);
    }
    if (members.empty()) {
      spdlog::debug("boosting discarded every round (error >= 0.5); using a single base model");
      return base_->fit(data, derive_seed(seed, 2 * rounds_ + 1));
    }
    return std::make_shared<VoteModel>(data.schema(), std::move(members), std::move(votes), dominant);
  }

 private:
  LearnerPtr base_;
  std::size_t rounds_;
};

class RandomSubspace final : public Learner {
 public:
  RandomSubspace(LearnerPtr base, double fraction, std::size_t members)
      : base_(std::move(base)), fraction_(fraction), members_(members) {
    if (members_ < 1) throw ConfigError("random subspace needs at least one member");
    if (!(fraction_ > 0 && fraction_ <= 1)) throw ConfigError("subspace fraction must lie in (0, 1]");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t seed) const override {
    require_trainable(data);
    const std::size_t f = data.num_features();
    const auto take = static_cast<std::size_t>(std::ceil(fraction_ * static_cast<double>(f)));
    if (take == 0) throw ConfigError("random subspace selects no features");
    std::vector<ModelPtr> members;
    for (std::size_t m = 0; m < members_; ++m) {
      Rng rng(derive_seed(seed, 2 * m));
      std::vector<std::size_t> features(f);
      std::iota(features.begin(), features.end(), 0);
      rng.shuffle(std::span(features));
      features.resize(take);
      std::sort(features.begin(), features.end());
      auto inner = base_->fit(data.project(features), derive_seed(seed, 2 * m + 1));
      members.push_back(std::make_shared<ProjectedModel>(data.schema(), std::move(features), std::move(inner)));
    }
    return std::make_shared<VoteModel>(data.schema(), std::move(members), std::vector<double>(members_, 1.0));
  }

 private:
  LearnerPtr base_;
  double fraction_;
  std::size_t members_;
};

class NestedDichotomies final : public Learner {
 public:
  NestedDichotomies(LearnerPtr base, std::size_t trees) : base_(std::move(base)), trees_(trees) {
    if (trees_ < 1) throw ConfigError("nested dichotomies need at least one tree");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t seed) const override {
    require_trainable(data);
    const auto class_w = data.class_weights();
    std::vector<std::uint32_t> present;
    for (std::uint32_t c = 0; c < class_w.size(); ++c) {
      if (class_w[c] > 0) present.push_back(c);
    }
    if (present.size() == 1) return constant_for(data, present.front());

    std::vector<DichotomyTree> trees;
    for (std::size_t t = 0; t < trees_; ++t) {
      Rng rng(derive_seed(seed, 2 * t));
      const std::uint64_t fit_seed = derive_seed(seed, 2 * t + 1);
      DichotomyTree tree;
      tree.nodes.push_back(DichotomyNode{present, nullptr, -1, -1});
      grow(data, tree, 0, rng, fit_seed);
      trees.push_back(std::move(tree));
    }
    return std::make_shared<NestedDichotomiesModel>(data.schema(), std::move(trees));
  }

 private:
  void grow(const Dataset& data, DichotomyTree& tree, std::size_t id, Rng& rng, std::uint64_t fit_seed) const {
    const std::vector<std::uint32_t> labels = tree.nodes[id].labels;
    if (labels.size() < 2) return;
    std::vector<std::uint32_t> a, b;
    do {
      a.clear();
      b.clear();
      for (std::uint32_t y : labels) (rng.coin() ? a : b).push_back(y);
    } while (a.empty() || b.empty());

    std::vector<std::uint32_t> side(data.num_classes(), 2);
    for (std::uint32_t y : a) side[y] = 0;
    for (std::uint32_t y : b) side[y] = 1;
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) > 0 && side[data.label(i)] < 2) rows.push_back(i);
    }
    std::vector<std::uint32_t> map(data.num_classes(), 0);
    for (std::uint32_t c = 0; c < data.num_classes(); ++c) map[c] = side[c] == 1 ? 1 : 0;
    Dataset binary = data.subset(rows).relabel(map, 2);
    tree.nodes[id].model = base_->fit(binary, derive_seed(fit_seed, id));

    const int first = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(DichotomyNode{a, nullptr, -1, -1});
    const int second = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(DichotomyNode{b, nullptr, -1, -1});
    tree.nodes[id].first = first;
    tree.nodes[id].second = second;
    grow(data, tree, static_cast<std::size_t>(first), rng, fit_seed);
    grow(data, tree, static_cast<std::size_t>(second), rng, fit_seed);
  }

  LearnerPtr base_;
  std::size_t trees_;
};

class Dagging final : public Learner {
 public:
  Dagging(LearnerPtr base, std::size_t folds) : base_(std::move(base)), folds_(folds) {
    if (folds_ < 1) throw ConfigError("dagging needs at least one fold");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t seed) const override {
    require_trainable(data);
    auto rows = positive_rows(data);
    const auto sizes = dagging_folds(rows.size(), folds_);
    Rng rng(derive_seed(seed, 0));
    rng.shuffle(std::span(rows));
    std::vector<ModelPtr> members;
    std::size_t start = 0;
    for (std::size_t m = 0; m < folds_; ++m) {
      std::span<const std::size_t> fold(rows.data() + start, sizes[m]);
      start += sizes[m];
      members.push_back(base_->fit(data.subset(fold), derive_seed(seed, m + 1)));
    }
    return std::make_shared<AverageModel>(data.schema(), std::move(members));
  }

 private:
  LearnerPtr base_;
  std::size_t folds_;
};

}  // namespace

LearnerPtr make_bagging(LearnerPtr base, std::size_t bags, double sample_frac) {
  return std::make_shared<Bagging>(std::move(base), bags, sample_frac);
}
LearnerPtr make_adaboost_m1(LearnerPtr base, std::size_t rounds) {
  return std::make_shared<AdaBoostM1>(std::move(base), rounds);
}
LearnerPtr make_random_subspace(LearnerPtr base, double fraction, std::size_t members) {
  return std::make_shared<RandomSubspace>(std::move(base), fraction, members);
}
LearnerPtr make_nested_dichotomies(LearnerPtr base, std::size_t trees) {
  return std::make_shared<NestedDichotomies>(std::move(base), trees);
}
LearnerPtr make_dagging(LearnerPtr base, std::size_t folds) {
  return std::make_shared<Dagging>(std::move(base), folds);
}

LearnerPtr make_ensemble(const EnsembleSpec& spec) {
  LearnerPtr base = make_learner(spec.base);
  switch (spec.scheme) {
    case Scheme::Individual: return base;
    case Scheme::Bagging: return make_bagging(std::move(base), spec.members, spec.sample_frac);
    case Scheme::Boosting: return make_adaboost_m1(std::move(base), spec.members);
    case Scheme::RandomSubspace: return make_random_subspace(std::move(base), spec.subspace, spec.members);
    case Scheme::NestedDichotomies: return make_nested_dichotomies(std::move(base), spec.members);
    case Scheme::Dagging: return make_dagging(std::move(base), spec.members);
  }
  throw InternalError("unhandled scheme");
}

}  // namespace procbench
