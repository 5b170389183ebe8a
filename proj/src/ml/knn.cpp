#include <algorithm>
#include <array>
#include <cstring>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "procbench/ml/learners.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {
namespace {

// Squared distance = nominal mismatches + squared differences of min-max scaled numerics.
// Training rows are grouped by their nominal pattern, so a query only scans buckets whose
// mismatch count (a lower bound on the squared distance) can still reach the current k-th
// neighbour.
class KnnModel final : public Model {
 public:
  KnnModel(const Dataset& data, int k) : Model(data.schema()), k_(static_cast<std::size_t>(k)) {
    const Schema& s = schema();
    for (std::uint32_t f = 0; f < s.size(); ++f) {
      (s.features[f].kind == FeatureKind::nominal ? nominal_ : numeric_).push_back(f);
    }
    lo_.assign(numeric_.size(), std::numeric_limits<double>::infinity());
    hi_.assign(numeric_.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) <= 0) continue;
      for (std::size_t j = 0; j < numeric_.size(); ++j) {
        lo_[j] = std::min(lo_[j], data.value(i, numeric_[j]));
        hi_[j] = std::max(hi_[j], data.value(i, numeric_[j]));
      }
    }
    std::unordered_map<std::string, std::size_t> index;  // pattern bytes -> bucket
    std::vector<std::uint32_t> pattern(nominal_.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) <= 0) continue;
      for (std::size_t j = 0; j < nominal_.size(); ++j) pattern[j] = static_cast<std::uint32_t>(data.value(i, nominal_[j]));
      auto [it, inserted] = index.emplace(key(pattern), buckets_.size());
      if (inserted) buckets_.push_back(Bucket{pattern, {}, {}, {}});
      Bucket& b = buckets_[it->second];
      for (std::size_t j = 0; j < numeric_.size(); ++j) b.values.push_back(scale(j, data.value(i, numeric_[j])));
      b.labels.push_back(data.label(i));
      b.weights.push_back(data.weight(i));
    }
    if (numeric_.size() == 1) {
      for (Bucket& b : buckets_) sort_bucket(b);
    }
    for (std::size_t bi = 0; bi < buckets_.size(); ++bi) insert(bi);
  }

  void distribution(FeatureVector x, std::span<double> out) const override {
    const auto hood = neighbours(x);
    std::fill(out.begin(), out.end(), 0.0);
    double total = 0;
    for (const auto& n : hood) {
      out[n.label] += n.weight;
      total += n.weight;
    }
    for (double& v : out) v /= total;
  }

  std::uint32_t label(FeatureVector x) const override {
    const auto hood = neighbours(x);
    std::vector<double> votes(num_classes(), 0.0);
    for (const auto& n : hood) votes[n.label] += n.weight;
    const double top = *std::max_element(votes.begin(), votes.end());
    // Among tied classes prefer the one owning the closest neighbour, then the lowest code.
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto& n : hood) {
      if (votes[n.label] != top) continue;
      if (n.dist2 < best_d || (n.dist2 == best_d && n.label < best)) {
        best_d = n.dist2;
        best = n.label;
      }
    }
    return best;
  }

 private:
  struct Bucket {
    std::vector<std::uint32_t> pattern;
    std::vector<double> values;  // numeric_.size() scaled values per row
    std::vector<std::uint32_t> labels;
    std::vector<double> weights;
  };

  // Patterns share prefixes; a leaf (depth = number of nominal features) names a bucket.
  struct TrieNode {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> children;  // (code, node), sorted by code
    std::size_t bucket = 0;
  };

  struct Neighbour {
    double dist2;
    std::uint32_t label;
    double weight;
  };

  // The k smallest distances seen so far and every row that was within the bound when met.
  struct Search {
    std::size_t k;
    std::vector<double> best;  // sorted, at most k
    std::vector<Neighbour> found;

    double bound() const { return best.size() < k ? std::numeric_limits<double>::infinity() : best.back(); }
    void offer(double d2, std::uint32_t label, double w) {
      if (d2 > bound()) return;
      found.push_back({d2, label, w});
      auto pos = std::upper_bound(best.begin(), best.end(), d2);
      best.insert(pos, d2);
      if (best.size() > k) best.pop_back();
    }
  };

  static std::string key(std::span<const std::uint32_t> pattern) {
    return std::string(reinterpret_cast<const char*>(pattern.data()), pattern.size() * sizeof(std::uint32_t));
  }
  void insert(std::size_t bucket) {
    std::uint32_t node = 0;
    for (std::uint32_t code : buckets_[bucket].pattern) {
      auto& ch = trie_[node].children;
      auto it = std::lower_bound(ch.begin(), ch.end(), std::make_pair(code, 0u));
      if (it == ch.end() || it->first != code) {
        const auto id = static_cast<std::uint32_t>(trie_.size());
        it = ch.insert(it, {code, id});
        trie_.emplace_back();
      }
      node = it->second;
    }
    trie_[node].bucket = bucket;
  }

  // Depth-first over the trie, matching branch first, pruning once the mismatches alone
  // exceed the current k-th distance.
  void descend(std::uint32_t node, std::size_t depth, double mismatches, std::span<const std::uint32_t> pattern,
               std::span<const double> q, Search& s) const {
    if (depth == pattern.size()) {
      visit(buckets_[trie_[node].bucket], mismatches, q, s);
      return;
    }
    const auto& ch = trie_[node].children;
    auto it = std::lower_bound(ch.begin(), ch.end(), std::make_pair(pattern[depth], 0u));
    const bool has_match = it != ch.end() && it->first == pattern[depth];
    if (has_match) descend(it->second, depth + 1, mismatches, pattern, q, s);
    if (mismatches + 1 > s.bound()) return;
    for (const auto& [code, child] : ch) {
      if (has_match && code == pattern[depth]) continue;
      if (mismatches + 1 > s.bound()) return;
      descend(child, depth + 1, mismatches + 1, pattern, q, s);
    }
  }

  double scale(std::size_t j, double v) const {
    const double range = hi_[j] - lo_[j];
    return range > 0 ? (v - lo_[j]) / range : 0.0;
  }

  static void sort_bucket(Bucket& b) {
    std::vector<std::size_t> order(b.labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return b.values[a] < b.values[c]; });
    Bucket sorted{b.pattern, {}, {}, {}};
    for (std::size_t i : order) {
      sorted.values.push_back(b.values[i]);
      sorted.labels.push_back(b.labels[i]);
      sorted.weights.push_back(b.weights[i]);
    }
    b = std::move(sorted);
  }

  void visit(const Bucket& b, double mismatches, std::span<const double> q, Search& s) const {
    if (mismatches > s.bound()) return;
    const std::size_t rows = b.labels.size();
    if (numeric_.size() == 1) {
      const double v = q[0];
      auto mid = static_cast<std::size_t>(std::lower_bound(b.values.begin(), b.values.end(), v) - b.values.begin());
      std::size_t lo = mid, hi = mid;  // candidates lo-1 (descending) and hi (ascending)
      while (lo > 0 || hi < rows) {
        const double dl = lo > 0 ? mismatches + (v - b.values[lo - 1]) * (v - b.values[lo - 1]) : std::numeric_limits<double>::infinity();
        const double dh = hi < rows ? mismatches + (b.values[hi] - v) * (b.values[hi] - v) : std::numeric_limits<double>::infinity();
        if (std::min(dl, dh) > s.bound()) break;
        if (dl <= dh) {
          --lo;
          s.offer(dl, b.labels[lo], b.weights[lo]);
        } else {
          s.offer(dh, b.labels[hi], b.weights[hi]);
          ++hi;
        }
      }
      return;
    }
    const std::size_t d = numeric_.size();
    for (std::size_t r = 0; r < rows; ++r) {
      double d2 = mismatches;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = b.values[r * d + j] - q[j];
        d2 += diff * diff;
      }
      s.offer(d2, b.labels[r], b.weights[r]);
    }
  }

  std::vector<Neighbour> neighbours(FeatureVector x) const {
    std::vector<std::uint32_t> pattern(nominal_.size());
    for (std::size_t j = 0; j < nominal_.size(); ++j) pattern[j] = static_cast<std::uint32_t>(x[nominal_[j]]);
    std::vector<double> q(numeric_.size());
    for (std::size_t j = 0; j < numeric_.size(); ++j) q[j] = scale(j, x[numeric_[j]]);

    Search s{k_, {}, {}};
    descend(0, 0, 0.0, pattern, q, s);
    const double bound = s.bound();
    std::vector<Neighbour> hood;
    for (const auto& n : s.found) {
      if (n.dist2 <= bound) hood.push_back(n);
    }
    return hood;
  }

  std::size_t k_;
  std::vector<std::uint32_t> nominal_, numeric_;
  std::vector<double> lo_, hi_;
  std::vector<Bucket> buckets_;
  std::vector<TrieNode> trie_ = std::vector<TrieNode>(1);
};

class Knn final : public Learner {
 public:
  explicit Knn(const KnnParams& p) : p_(p) {
    if (p_.k < 1) throw ConfigError("KNN k must be >= 1");
  }
  ModelPtr fit(const Dataset& data, std::uint64_t) const override {
    require_trainable(data);
    return std::make_shared<KnnModel>(data, p_.k);
  }

 private:
  KnnParams p_;
};

}  // namespace

LearnerPtr make_knn(const KnnParams& params) { return std::make_shared<Knn>(params); }

LearnerPtr make_knn(const LearnerSpec& spec) {
  ParamReader r(spec);
  KnnParams p;
  p.k = static_cast<int>(r.integer("k", p.k, 1, 1 << 20));
  r.finish();
  return make_knn(p);
}

}  // namespace procbench
