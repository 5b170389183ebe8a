#include "procbench/stats/tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "procbench/stats/distributions.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

namespace {
void require_shape(const RankMatrix& rm) {
  if (rm.blocks() < 2 || rm.classifiers() < 2) throw InputError("rank matrix needs at least 2 blocks and 2 classifiers");
}
}  // namespace

FriedmanResult friedman_test(const RankMatrix& rm, double alpha) {
  require_shape(rm);
  const double n = static_cast<double>(rm.blocks());
  const double k = static_cast<double>(rm.classifiers());
  const auto avg = average_rank(rm);
  double ss = 0;
  for (double r : avg) ss += (r - (k + 1) / 2) * (r - (k + 1) / 2);
  FriedmanResult out;
  out.chi2 = 12 * n / (k * (k + 1)) * ss;
  if (out.chi2 < 1e-12) out.chi2 = 0;
  out.degrees_of_freedom = static_cast<int>(rm.classifiers()) - 1;
  out.p_value = chi_square_sf(out.chi2, out.degrees_of_freedom);
  out.alpha = alpha;
  out.reject = out.p_value < alpha;
  return out;
}

std::vector<Comparison> posthoc_vs_control(const RankMatrix& rm, std::size_t control) {
  require_shape(rm);
  if (control >= rm.classifiers()) throw InputError("control classifier index out of range");
  const double n = static_cast<double>(rm.blocks());
  const double k = static_cast<double>(rm.classifiers());
  const double se = std::sqrt(k * (k + 1) / (6 * n));
  const auto avg = average_rank(rm);
  std::vector<Comparison> out;
  for (std::size_t j = 0; j < rm.classifiers(); ++j) {
    if (j == control) continue;
    const double z = (avg[j] - avg[control]) / se;
    out.push_back(Comparison{j, z, std::min(1.0, 2 * normal_sf(std::abs(z)))});
  }
  return out;
}

std::size_t select_control(const RankMatrix& rm) {
  const auto avg = average_rank(rm);
  return static_cast<std::size_t>(std::min_element(avg.begin(), avg.end()) - avg.begin());
}

std::vector<double> rom_critical_values(std::size_t m, double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw InputError("alpha must lie in (0, 1]");
  std::vector<double> c(m + 1, 0.0);  // 1-based
  if (m >= 1) c[1] = alpha;
  if (m >= 2) c[2] = alpha / 2;
  for (std::size_t i = 3; i <= m; ++i) {
    double s1 = 0;
    for (std::size_t j = 1; j <= i - 1; ++j) s1 += std::pow(alpha, static_cast<double>(j));
    double s2 = 0;
    double binom = 1;  // C(i, j)
    for (std::size_t j = 1; j <= i - 2; ++j) {
      binom = binom * static_cast<double>(i - j + 1) / static_cast<double>(j);
      s2 += binom * std::pow(c[j + 1], static_cast<double>(i - j));
    }
    c[i] = (s1 - s2) / static_cast<double>(i);
  }
  c.erase(c.begin());
  return c;
}

RomResult rom_adjust(const std::vector<double>& p_values, double alpha) {
  for (double p : p_values) {
    if (!(p >= 0 && p <= 1)) throw InputError("p-values must lie in [0, 1]");
  }
  const std::size_t m = p_values.size();
  RomResult out;
  out.adjusted.assign(m, 1.0);
  out.reject.assign(m, false);
  if (m == 0) return out;
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

  // Level at which the t-th smallest p (1-based) meets its critical value c_{m-t+1}.
  auto level_for = [&](std::size_t t) {
    const double p = p_values[order[t - 1]];
    const std::size_t i = m - t + 1;
    if (i == 1) return p;
    auto crit = [&](double a) { return rom_critical_values(i, a)[i - 1]; };
    if (crit(1.0) < p) return 1.0;
    double lo = p, hi = 1.0;  // c_i(a) <= a, so the answer is at least p
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (crit(mid) >= p ? hi : lo) = mid;
    }
    return hi;
  };
  std::vector<double> level(m + 1);
  for (std::size_t t = 1; t <= m; ++t) level[t] = std::min(1.0, level_for(t));
  double running = 1.0;
  for (std::size_t t = m; t >= 1; --t) {
    running = std::min(running, level[t]);
    out.adjusted[order[t - 1]] = std::max(running, p_values[order[t - 1]]);
  }
  for (std::size_t i = 0; i < m; ++i) out.reject[i] = out.adjusted[i] < alpha;
  return out;
}

}  // namespace procbench
