#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "procbench/ml/learners.hpp"
#include "procbench/stats/distributions.hpp"
#include "procbench/util/errors.hpp"
#include "tree.hpp"

namespace procbench {

double c45_added_errors(double n, double e, double cf) {
  if (cf > 0.5) throw ConfigError("confidence factor must not exceed 0.5");
  if (e < 1) {
    const double base = n * (1 - std::pow(cf, 1 / n));
    if (e == 0) return base;
    return base + e * (c45_added_errors(n, 1, cf) - base);
  }
  if (e + 0.5 >= n) return std::max(n - e, 0.0);
  const double z = normal_quantile(1 - cf);
  const double f = (e + 0.5) / n;
  const double r = (f + (z * z) / (2 * n) + z * std::sqrt((f / n) - (f * f / n) + (z * z / (4 * n * n)))) /
                   (1 + (z * z) / n);
  return r * n - e;
}

namespace {

using detail::SplitKind;
using detail::TreeNode;

struct Candidate {
  bool valid = false;
  std::uint32_t feature = 0;
  SplitKind kind = SplitKind::leaf;
  double threshold = 0;
  double gain = 0;
  double ratio = 0;
};

double split_info(std::span<const double> bag_weights, double total) {
  double s = 0;
  for (double w : bag_weights) {
    if (w > 0) s -= (w / total) * std::log2(w / total);
  }
  return s;
}

class C45Builder {
 public:
  C45Builder(const Dataset& data, const C45Params& p) : data_(data), p_(p) {}

  std::unique_ptr<TreeNode> build(std::vector<std::size_t> rows) {
    auto node = std::make_unique<TreeNode>();
    node->counts = detail::class_counts(data_, rows);
    node->weight = detail::sum(node->counts);
    if (rows.empty()) return node;
    const double majority = detail::max_of(node->counts);
    if (node->weight < 2 * p_.min_leaf || majority >= node->weight - 1e-9) return node;

    Candidate best = select(rows, node->counts, node->weight);
    if (!best.valid && !p_.prune) best = fallback(rows, node->counts);
    if (!best.valid) return node;

    node->kind = best.kind;
    node->feature = best.feature;
    node->threshold = best.threshold;
    const Feature& f = data_.schema().features[best.feature];
    const std::size_t branches = best.kind == SplitKind::multiway ? f.arity : 2;
    std::vector<std::vector<std::size_t>> parts(branches);
    for (std::size_t r : rows) {
      const double v = data_.value(r, best.feature);
      parts[best.kind == SplitKind::multiway ? static_cast<std::size_t>(v) : (v <= best.threshold ? 0 : 1)]
          .push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();
    for (auto& part : parts) node->children.push_back(build(std::move(part)));
    return node;
  }

 private:
  Candidate evaluate_nominal(std::span<const std::size_t> rows, std::uint32_t f,
                             std::span<const double> counts, double total) const {
    const std::uint32_t arity = data_.schema().features[f].arity;
    const std::uint32_t k = data_.num_classes();
    std::vector<double> bags(static_cast<std::size_t>(arity) * k, 0.0);
    for (std::size_t r : rows) {
      bags[static_cast<std::size_t>(data_.value(r, f)) * k + data_.label(r)] += data_.weight(r);
    }
    std::vector<double> bag_w(arity, 0.0);
    double new_ent = 0;
    int big = 0;
    for (std::uint32_t v = 0; v < arity; ++v) {
      std::span<const double> bag(bags.data() + static_cast<std::size_t>(v) * k, k);
      bag_w[v] = detail::sum(bag);
      if (bag_w[v] >= p_.min_leaf - 1e-9) ++big;
      new_ent += detail::weighted_entropy(bag);
    }
    Candidate c;
    if (big < 2) return c;
    c.valid = true;
    c.feature = f;
    c.kind = SplitKind::multiway;
    c.gain = (detail::weighted_entropy(counts) - new_ent) / total;
    if (std::abs(c.gain) < 1e-12) c.gain = 0;
    const double si = split_info(bag_w, total);
    c.ratio = si > 0 ? c.gain / si : 0;
    return c;
  }

  Candidate evaluate_numeric(std::vector<std::size_t>& sorted, std::uint32_t f,
                             std::span<const double> counts, double total) const {
    Candidate c;
    double min_split = 0.1 * total / data_.num_classes();
    min_split = std::clamp(min_split, p_.min_leaf, std::max(p_.min_leaf, 25.0));
    if (total < 2 * min_split) return c;
    detail::sort_rows_by(data_, sorted, f);
    const auto t = detail::best_threshold(data_, sorted, f, counts, min_split, 1e-5);
    if (!t.valid) return c;
    const double gain = t.gain - std::log2(static_cast<double>(t.candidates)) / total;
    if (gain <= 0) return c;
    double left = 0;
    for (std::size_t i = 0; i < t.left_rows; ++i) left += data_.weight(sorted[i]);
    const double bag_w[2] = {left, total - left};
    c.valid = true;
    c.feature = f;
    c.kind = SplitKind::threshold;
    c.threshold = t.threshold;
    c.gain = gain;
    const double si = split_info(bag_w, total);
    c.ratio = si > 0 ? gain / si : 0;
    return c;
  }

  Candidate select(std::span<const std::size_t> rows, std::span<const double> counts, double total) const {
    std::vector<Candidate> cands;
    std::vector<std::size_t> scratch(rows.begin(), rows.end());
    for (std::uint32_t f = 0; f < data_.num_features(); ++f) {
      cands.push_back(data_.schema().features[f].kind == FeatureKind::nominal
                          ? evaluate_nominal(rows, f, counts, total)
                          : evaluate_numeric(scratch, f, counts, total));
    }
    double avg = 0;
    int valid = 0;
    for (const auto& c : cands) {
      if (c.valid) {
        avg += c.gain;
        ++valid;
      }
    }
    if (valid == 0) return {};
    avg /= valid;
    Candidate best;
    double min_ratio = 0;
    for (const auto& c : cands) {
      if (c.valid && c.gain >= avg - 1e-3 && c.ratio > min_ratio + 1e-12) {
        best = c;
        min_ratio = c.ratio;
      }
    }
    return best;
  }

  // Unpruned trees split impure nodes even without positive gain, so that any consistent
  // training set is fitted exactly.
  Candidate fallback(std::span<const std::size_t> rows, std::span<const double> counts) const {
    const double total = detail::sum(counts);
    Candidate best;
    std::vector<std::size_t> scratch(rows.begin(), rows.end());
    for (std::uint32_t f = 0; f < data_.num_features(); ++f) {
      Candidate c;
      if (data_.schema().features[f].kind == FeatureKind::nominal) {
        c = evaluate_nominal(rows, f, counts, total);
        if (c.valid) {
          // needs two non-empty branches, not just two of min_leaf weight
          std::vector<char> seen(data_.schema().features[f].arity, 0);
          int distinct = 0;
          for (std::size_t r : rows) distinct += !seen[static_cast<std::size_t>(data_.value(r, f))]++;
          c.valid = distinct >= 2;
        }
      } else {
        detail::sort_rows_by(data_, scratch, f);
        const auto t = detail::best_threshold(data_, scratch, f, counts, p_.min_leaf, 0.0);
        if (t.valid) {
          c.valid = true;
          c.feature = f;
          c.kind = SplitKind::threshold;
          c.threshold = t.threshold;
          c.gain = t.gain;
        }
      }
      if (c.valid && (!best.valid || c.gain > best.gain + 1e-12)) best = c;
    }
    return best;
  }

  const Dataset& data_;
  C45Params p_;
};

double training_errors(const TreeNode& n) {
  if (n.is_leaf()) return n.weight - detail::max_of(n.counts);
  double e = 0;
  for (const auto& c : n.children) e += training_errors(*c);
  return e;
}

void collapse(TreeNode& n) {
  if (n.is_leaf()) return;
  const double subtree = training_errors(n);
  const double here = n.weight - detail::max_of(n.counts);
  if (subtree >= here - 1e-3) {
    n.make_leaf();
    return;
  }
  for (auto& c : n.children) collapse(*c);
}

double estimated_errors_leaf(const TreeNode& n, double cf) {
  if (n.weight <= 0) return 0;
  const double e = n.weight - detail::max_of(n.counts);
  return e + c45_added_errors(n.weight, e, cf);
}

double estimated_errors(const TreeNode& n, double cf) {
  if (n.is_leaf()) return estimated_errors_leaf(n, cf);
  double e = 0;
  for (const auto& c : n.children) e += estimated_errors(*c, cf);
  return e;
}

void prune(TreeNode& n, double cf) {
  if (n.is_leaf()) return;
  for (auto& c : n.children) prune(*c, cf);
  if (estimated_errors_leaf(n, cf) <= estimated_errors(n, cf) + 0.1) n.make_leaf();
}

class C45 final : public Learner {
 public:
  explicit C45(const C45Params& p) : p_(p) {
    if (!(p_.confidence > 0 && p_.confidence <= 0.5)) throw ConfigError("DT confidence must lie in (0, 0.5]");
    if (!(p_.min_leaf > 0)) throw ConfigError("DT min_leaf must be positive");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t) const override {
    require_trainable(data);
    std::vector<std::size_t> rows;
    rows.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) > 0) rows.push_back(i);
    }
    auto root = C45Builder(data, p_).build(std::move(rows));
    if (p_.prune) {
      collapse(*root);
      prune(*root, p_.confidence);
    }
    auto present = detail::present_classes(root->counts);
    return std::make_shared<detail::TreeModel>(data.schema(), std::move(root), std::move(present));
  }

 private:
  C45Params p_;
};

}  // namespace

LearnerPtr make_c45(const C45Params& params) { return std::make_shared<C45>(params); }

LearnerPtr make_c45(const LearnerSpec& spec) {
  ParamReader r(spec);
  C45Params p;
  p.confidence = r.real("confidence", p.confidence, 1e-6, 0.5);
  p.min_leaf = r.real("min_leaf", p.min_leaf, 1e-6, 1e9);
  p.prune = r.flag("prune", p.prune);
  r.finish();
  return make_c45(p);
}

}  // namespace procbench
