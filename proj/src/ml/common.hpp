#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace procbench::detail {

inline std::vector<char> present_classes(std::span<const double> class_weights) {
  std::vector<char> present(class_weights.size());
  for (std::size_t c = 0; c < class_weights.size(); ++c) present[c] = class_weights[c] > 0;
  return present;
}

// (count + 1) / (total + |present|) over the present classes, 0 elsewhere.
inline void laplace(std::span<const double> counts, const std::vector<char>& present,
                    std::span<double> out) {
  double total = 0;
  double classes = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (present[c]) {
      total += counts[c];
      classes += 1;
    }
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    out[c] = present[c] ? (counts[c] + 1.0) / (total + classes) : 0.0;
  }
}

inline double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

// W * H(counts) in bits, where W is the total weight.
inline double weighted_entropy(std::span<const double> counts) {
  double total = 0;
  double s = 0;
  for (double c : counts) {
    total += c;
    s += xlog2x(c);
  }
  return xlog2x(total) - s;
}

inline double entropy(std::span<const double> counts) {
  double total = 0;
  for (double c : counts) total += c;
  return total > 0 ? weighted_entropy(counts) / total : 0.0;
}

inline double sum(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

inline double max_of(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = x > m ? x : m;
  return m;
}

}  // namespace procbench::detail
