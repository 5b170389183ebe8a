#include <algorithm>
#include <cstring>

#include "common.hpp"
#include "procbench/ml/learners.hpp"
#include "procbench/util/errors.hpp"
#include "procbench/util/rng.hpp"
#include "tree.hpp"

namespace procbench {
namespace {

enum class Op : std::uint8_t { eq, le, gt };

struct Antecedent {
  std::uint32_t feature = 0;
  Op op = Op::eq;
  double value = 0;

  bool covers(FeatureVector x) const {
    const double v = x[feature];
    switch (op) {
      case Op::eq: return v == value;
      case Op::le: return v <= value;
      case Op::gt: return v > value;
    }
    return false;
  }
};

bool covers_all(std::span<const Antecedent> rule, FeatureVector x) {
  for (const auto& a : rule) {
    if (!a.covers(x)) return false;
  }
  return true;
}

class ConjunctiveRuleModel final : public Model {
 public:
  ConjunctiveRuleModel(Schema schema, std::vector<Antecedent> rule, std::vector<double> covered,
                       std::vector<double> uncovered, std::vector<char> present)
      : Model(std::move(schema)), rule_(std::move(rule)), covered_(std::move(covered)),
        uncovered_(std::move(uncovered)), present_(std::move(present)) {}

  void distribution(FeatureVector x, std::span<double> out) const override {
    const auto& counts = covers_all(rule_, x) && detail::sum(covered_) > 0 ? covered_ : uncovered_;
    detail::laplace(counts, present_, out);
  }

 private:
  std::vector<Antecedent> rule_;
  std::vector<double> covered_;
  std::vector<double> uncovered_;
  std::vector<char> present_;
};

class ConjunctiveRule final : public Learner {
 public:
  explicit ConjunctiveRule(const ConjunctiveRuleParams& p) : p_(p) {
    if (p_.folds < 1) throw ConfigError("CR folds must be >= 1");
    if (!(p_.min_weight > 0)) throw ConfigError("CR min_weight must be positive");
    if (p_.max_antecedents < -1) throw ConfigError("CR max_antecedents must be >= -1");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t seed) const override {
    require_trainable(data);
    // Fold membership hashes the instance content, so identical instances always share a fold.
    std::vector<std::size_t> grow, prune;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) <= 0) continue;
      std::uint64_t h = hash_combine(seed, std::uint64_t{data.label(i)});
      for (double v : data.row(i)) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = hash_combine(h, bits);
      }
      (p_.folds > 1 && h % static_cast<std::uint64_t>(p_.folds) == 0 ? prune : grow).push_back(i);
    }
    if (grow.empty()) std::swap(grow, prune);

    const auto all_counts = data.class_weights();
    const std::uint32_t default_class = argmax(all_counts);
    std::vector<Antecedent> rule = grow_rule(data, grow);

    // Reduced-error pruning: keep the prefix with the best hold-out accuracy, shortest on ties.
    std::size_t keep = rule.size();
    if (!prune.empty()) {
      double best = -1;
      for (std::size_t len = 0; len <= rule.size(); ++len) {
        std::span<const Antecedent> prefix(rule.data(), len);
        std::vector<double> cov(data.num_classes(), 0.0);
        std::vector<double> unc(data.num_classes(), 0.0);
        for (std::size_t r : grow) {
          (covers_all(prefix, data.row(r)) ? cov : unc)[data.label(r)] += data.weight(r);
        }
        const std::uint32_t rule_class = argmax(cov);
        const std::uint32_t rest_class = detail::sum(unc) > 0 ? argmax(unc) : default_class;
        double correct = 0;
        for (std::size_t r : prune) {
          const std::uint32_t pred = covers_all(prefix, data.row(r)) ? rule_class : rest_class;
          if (pred == data.label(r)) correct += data.weight(r);
        }
        if (correct > best + 1e-9) {
          best = correct;
          keep = len;
        }
      }
    }
    rule.resize(keep);

    std::vector<double> covered(data.num_classes(), 0.0);
    std::vector<double> uncovered(data.num_classes(), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      (covers_all(rule, data.row(i)) ? covered : uncovered)[data.label(i)] += data.weight(i);
    }
    if (detail::sum(uncovered) <= 0) uncovered = all_counts;
    auto present = detail::present_classes(all_counts);
    return std::make_shared<ConjunctiveRuleModel>(data.schema(), std::move(rule), std::move(covered),
                                                  std::move(uncovered), std::move(present));
  }

 private:
  // Adds the antecedent with the largest information gain of the (satisfied, not satisfied)
  // split of the currently covered data; the rule keeps the lower-entropy side of a numeric
  // cut. Each feature is tested at most once.
  std::vector<Antecedent> grow_rule(const Dataset& data, std::vector<std::size_t> covered) const {
    const std::uint32_t k = data.num_classes();
    std::vector<Antecedent> rule;
    std::vector<char> used(data.num_features(), 0);
    while (p_.max_antecedents < 0 || rule.size() < static_cast<std::size_t>(p_.max_antecedents)) {
      const auto counts = detail::class_counts(data, covered);
      const double total = detail::sum(counts);
      const double current = detail::weighted_entropy(counts);
      if (current <= 1e-12) break;
      auto split_gain = [&](std::span<const double> in) {
        std::vector<double> out(counts);
        for (std::uint32_t c = 0; c < k; ++c) out[c] = std::max(out[c] - in[c], 0.0);
        return (current - detail::weighted_entropy(in) - detail::weighted_entropy(out)) / total;
      };
      bool found = false;
      double best_gain = 1e-10;
      Antecedent best;
      for (std::uint32_t f = 0; f < data.num_features(); ++f) {
        if (used[f]) continue;
        const Feature& feat = data.schema().features[f];
        if (feat.kind == FeatureKind::nominal) {
          std::vector<double> bags(static_cast<std::size_t>(feat.arity) * k, 0.0);
          for (std::size_t r : covered) bags[static_cast<std::size_t>(data.value(r, f)) * k + data.label(r)] += data.weight(r);
          for (std::uint32_t v = 0; v < feat.arity; ++v) {
            std::span<const double> bag(bags.data() + static_cast<std::size_t>(v) * k, k);
            if (detail::sum(bag) < p_.min_weight - 1e-9) continue;
            const double gain = split_gain(bag);
            if (gain > best_gain) {
              found = true;
              best_gain = gain;
              best = {f, Op::eq, static_cast<double>(v)};
            }
          }
        } else {
          std::vector<std::size_t> sorted = covered;
          detail::sort_rows_by(data, sorted, f);
          std::vector<double> left(k, 0.0);
          std::vector<double> right = counts;
          double left_w = 0;
          for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            const std::size_t r = sorted[i];
            left[data.label(r)] += data.weight(r);
            right[data.label(r)] -= data.weight(r);
            left_w += data.weight(r);
            const double v = data.value(r, f);
            const double next = data.value(sorted[i + 1], f);
            if (!(v < next)) continue;
            double mid = v + (next - v) / 2;
            if (!(mid < next)) mid = v;
            for (double& c : right) c = std::max(c, 0.0);
            const bool keep_left = detail::entropy(left) <= detail::entropy(right);
            const double side_w = keep_left ? left_w : total - left_w;
            if (side_w < p_.min_weight - 1e-9) continue;
            const double gain = split_gain(keep_left ? left : right);
            if (gain > best_gain) {
              found = true;
              best_gain = gain;
              best = {f, keep_left ? Op::le : Op::gt, mid};
            }
          }
        }
      }
      if (!found) break;
      used[best.feature] = 1;
      rule.push_back(best);
      std::vector<std::size_t> next;
      for (std::size_t r : covered) {
        if (best.covers(data.row(r))) next.push_back(r);
      }
      covered = std::move(next);
    }
    return rule;
  }

  ConjunctiveRuleParams p_;
};

}  // namespace

LearnerPtr make_conjunctive_rule(const ConjunctiveRuleParams& params) {
  return std::make_shared<ConjunctiveRule>(params);
}

LearnerPtr make_conjunctive_rule(const LearnerSpec& spec) {
  ParamReader r(spec);
  ConjunctiveRuleParams p;
  p.folds = static_cast<int>(r.integer("folds", p.folds, 1, 1000));
  p.min_weight = r.real("min_weight", p.min_weight, 1e-6, 1e9);
  p.max_antecedents = static_cast<int>(r.integer("max_antecedents", p.max_antecedents, -1, 1 << 20));
  r.finish();
  return make_conjunctive_rule(p);
}

}  // namespace procbench
