#include <algorithm>

#include "common.hpp"
#include "procbench/ml/learners.hpp"
#include "procbench/util/errors.hpp"
#include "tree.hpp"

namespace procbench {
namespace {

struct Rule {
  std::uint32_t feature = 0;
  bool numeric = false;
  std::vector<double> breakpoints;          // numeric: bucket i holds values <= breakpoints[i]
  std::vector<std::vector<double>> counts;  // per value (nominal) or bucket (numeric)
  double errors = 0;
};

double rule_errors(const std::vector<std::vector<double>>& counts) {
  double e = 0;
  for (const auto& c : counts) e += detail::sum(c) - detail::max_of(c);
  return e;
}

class OneRModel final : public Model {
 public:
  OneRModel(Schema schema, Rule rule, std::vector<double> overall, std::vector<char> present)
      : Model(std::move(schema)), rule_(std::move(rule)), overall_(std::move(overall)), present_(std::move(present)) {}

  void distribution(FeatureVector x, std::span<double> out) const override {
    const double v = x[rule_.feature];
    std::size_t slot;
    if (rule_.numeric) {
      slot = static_cast<std::size_t>(std::lower_bound(rule_.breakpoints.begin(), rule_.breakpoints.end(), v) -
                                      rule_.breakpoints.begin());
    } else {
      slot = static_cast<std::size_t>(v);
    }
    const auto& c = rule_.counts[slot];
    detail::laplace(detail::sum(c) > 0 ? c : overall_, present_, out);
  }

  const Rule& rule() const { return rule_; }

 private:
  Rule rule_;
  std::vector<double> overall_;
  std::vector<char> present_;
};

class OneR final : public Learner {
 public:
  explicit OneR(const OneRParams& p) : p_(p) {
    if (!(p_.min_bucket > 0)) throw ConfigError("ONER min_bucket must be positive");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t) const override {
    require_trainable(data);
    const auto overall = data.class_weights();
    bool have = false;
    Rule best;
    for (std::uint32_t f = 0; f < data.num_features(); ++f) {
      Rule r = data.schema().features[f].kind == FeatureKind::nominal ? nominal_rule(data, f) : numeric_rule(data, f);
      if (!have || r.errors < best.errors - 1e-9) {
        best = std::move(r);
        have = true;
      }
    }
    auto present = detail::present_classes(overall);
    return std::make_shared<OneRModel>(data.schema(), std::move(best), overall, std::move(present));
  }

 private:
  static Rule nominal_rule(const Dataset& data, std::uint32_t f) {
    Rule r;
    r.feature = f;
    r.counts.assign(data.schema().features[f].arity, std::vector<double>(data.num_classes(), 0.0));
    for (std::size_t i = 0; i < data.size(); ++i) {
      r.counts[static_cast<std::size_t>(data.value(i, f))][data.label(i)] += data.weight(i);
    }
    r.errors = rule_errors(r.counts);
    return r;
  }

  // Holte's bucketing over runs of equal values: a bucket closes once its majority class has
  // min_bucket weight, then swallows following runs that consist only of that class.
  Rule numeric_rule(const Dataset& data, std::uint32_t f) const {
    const std::uint32_t k = data.num_classes();
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (data.weight(i) > 0) rows.push_back(i);
    }
    detail::sort_rows_by(data, rows, f);
    std::vector<double> run_value;
    std::vector<std::vector<double>> run_counts;
    for (std::size_t r : rows) {
      const double v = data.value(r, f);
      if (run_value.empty() || v != run_value.back()) {
        run_value.push_back(v);
        run_counts.emplace_back(k, 0.0);
      }
      run_counts.back()[data.label(r)] += data.weight(r);
    }
    auto pure_class = [&](std::size_t i) -> int {
      int cls = -1;
      for (std::uint32_t c = 0; c < k; ++c) {
        if (run_counts[i][c] > 0) {
          if (cls >= 0) return -1;
          cls = static_cast<int>(c);
        }
      }
      return cls;
    };

    struct Bucket {
      std::vector<double> counts;
      double last_value;
      std::uint32_t majority;
    };
    std::vector<Bucket> buckets;
    std::size_t i = 0;
    const std::size_t runs = run_value.size();
    while (i < runs) {
      Bucket b{std::vector<double>(k, 0.0), 0, 0};
      do {
        for (std::uint32_t c = 0; c < k; ++c) b.counts[c] += run_counts[i][c];
        b.last_value = run_value[i];
        ++i;
      } while (i < runs && detail::max_of(b.counts) < p_.min_bucket - 1e-9);
      b.majority = argmax(b.counts);
      while (i < runs && pure_class(i) == static_cast<int>(b.majority)) {
        for (std::uint32_t c = 0; c < k; ++c) b.counts[c] += run_counts[i][c];
        b.last_value = run_value[i];
        ++i;
      }
      if (!buckets.empty() && buckets.back().majority == b.majority) {
        Bucket& prev = buckets.back();
        for (std::uint32_t c = 0; c < k; ++c) prev.counts[c] += b.counts[c];
        prev.last_value = b.last_value;
        prev.majority = argmax(prev.counts);
      } else {
        buckets.push_back(std::move(b));
      }
    }

    Rule r;
    r.feature = f;
    r.numeric = true;
    std::size_t next_run = 0;
    for (std::size_t bi = 0; bi < buckets.size(); ++bi) {
      r.counts.push_back(buckets[bi].counts);
      if (bi + 1 < buckets.size()) {
        while (run_value[next_run] <= buckets[bi].last_value) ++next_run;
        const double lo = buckets[bi].last_value;
        const double hi = run_value[next_run];
        double mid = lo + (hi - lo) / 2;
        if (!(mid < hi)) mid = lo;
        r.breakpoints.push_back(mid);
      }
    }
    if (r.counts.empty()) r.counts.emplace_back(k, 0.0);
    r.errors = rule_errors(r.counts);
    return r;
  }

  OneRParams p_;
};

}  // namespace

LearnerPtr make_oner(const OneRParams& params) { return std::make_shared<OneR>(params); }

LearnerPtr make_oner(const LearnerSpec& spec) {
  ParamReader r(spec);
  OneRParams p;
  p.min_bucket = r.real("min_bucket", p.min_bucket, 1e-6, 1e9);
  r.finish();
  return make_oner(p);
}

}  // namespace procbench
