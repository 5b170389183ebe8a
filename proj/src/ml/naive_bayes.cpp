#include <cmath>
#include <limits>

#include "common.hpp"
#include "procbench/ml/learners.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {
namespace {

class NaiveBayesModel final : public Model {
 public:
  struct Gaussian {
    double mean = 0;
    double variance = 1;
  };

  NaiveBayesModel(Schema schema, std::vector<char> present, std::vector<double> log_prior,
                  std::vector<std::vector<double>> log_nominal, std::vector<std::vector<Gaussian>> gauss)
      : Model(std::move(schema)), present_(std::move(present)), log_prior_(std::move(log_prior)),
        log_nominal_(std::move(log_nominal)), gauss_(std::move(gauss)) {}

  void distribution(FeatureVector x, std::span<double> out) const override {
    const std::uint32_t k = num_classes();
    std::vector<double> score(k, -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::uint32_t c = 0; c < k; ++c) {
      if (!present_[c]) continue;
      double s = log_prior_[c];
      for (std::size_t f = 0; f < schema().size(); ++f) {
        if (schema().features[f].kind == FeatureKind::nominal) {
          s += log_nominal_[f][static_cast<std::size_t>(x[f]) * k + c];
        } else {
          const Gaussian& g = gauss_[f][c];
          const double d = x[f] - g.mean;
          s += -0.5 * std::log(2 * M_PI * g.variance) - d * d / (2 * g.variance);
        }
      }
      score[c] = s;
      top = std::max(top, s);
    }
    double total = 0;
    for (std::uint32_t c = 0; c < k; ++c) {
      out[c] = present_[c] ? std::exp(score[c] - top) : 0.0;
      total += out[c];
    }
    for (std::uint32_t c = 0; c < k; ++c) out[c] /= total;
  }

 private:
  std::vector<char> present_;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_nominal_;  // per feature: [value * k + class]
  std::vector<std::vector<Gaussian>> gauss_;      // per feature: [class]
};

class NaiveBayes final : public Learner {
 public:
  explicit NaiveBayes(const NaiveBayesParams& p) : p_(p) {
    if (!(p_.variance_floor > 0)) throw ConfigError("NB variance_floor must be positive");
  }

  ModelPtr fit(const Dataset& data, std::uint64_t) const override {
    require_trainable(data);
    const std::uint32_t k = data.num_classes();
    const auto class_w = data.class_weights();
    auto present = detail::present_classes(class_w);
    std::vector<double> prior(k, 0.0);
    detail::laplace(class_w, present, prior);
    std::vector<double> log_prior(k);
    for (std::uint32_t c = 0; c < k; ++c) log_prior[c] = present[c] ? std::log(prior[c]) : 0.0;

    const Schema& schema = data.schema();
    std::vector<std::vector<double>> log_nominal(schema.size());
    std::vector<std::vector<NaiveBayesModel::Gaussian>> gauss(schema.size());
    for (std::size_t f = 0; f < schema.size(); ++f) {
      if (schema.features[f].kind == FeatureKind::nominal) {
        const std::uint32_t arity = schema.features[f].arity;
        std::vector<double> counts(static_cast<std::size_t>(arity) * k, 0.0);
        for (std::size_t i = 0; i < data.size(); ++i) {
          counts[static_cast<std::size_t>(data.value(i, f)) * k + data.label(i)] += data.weight(i);
        }
        auto& table = log_nominal[f];
        table.resize(counts.size());
        for (std::uint32_t v = 0; v < arity; ++v) {
          for (std::uint32_t c = 0; c < k; ++c) {
            table[v * k + c] = std::log((counts[v * k + c] + 1.0) / (class_w[c] + arity));
          }
        }
      } else {
        std::vector<double> sum(k, 0.0), mean(k, 0.0), sq(k, 0.0);
        for (std::size_t i = 0; i < data.size(); ++i) sum[data.label(i)] += data.weight(i) * data.value(i, f);
        for (std::uint32_t c = 0; c < k; ++c) mean[c] = class_w[c] > 0 ? sum[c] / class_w[c] : 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
          const double d = data.value(i, f) - mean[data.label(i)];
          sq[data.label(i)] += data.weight(i) * d * d;
        }
        gauss[f].resize(k);
        for (std::uint32_t c = 0; c < k; ++c) {
          const double var = class_w[c] > 0 ? sq[c] / class_w[c] : 0.0;
          gauss[f][c] = {mean[c], std::max(var, p_.variance_floor)};
        }
      }
    }
    return std::make_shared<NaiveBayesModel>(schema, std::move(present), std::move(log_prior),
                                             std::move(log_nominal), std::move(gauss));
  }

 private:
  NaiveBayesParams p_;
};

}  // namespace

LearnerPtr make_naive_bayes(const NaiveBayesParams& params) { return std::make_shared<NaiveBayes>(params); }

LearnerPtr make_naive_bayes(const LearnerSpec& spec) {
  ParamReader r(spec);
  NaiveBayesParams p;
  p.variance_floor = r.real("variance_floor", p.variance_floor, 1e-300, 1e300);
  r.finish();
  return make_naive_bayes(p);
}

}  // namespace procbench
