#pragma once

#include <cstddef>
#include <vector>

#include "procbench/evaluation/evaluation.hpp"

namespace procbench {

struct FriedmanResult {
  double chi2 = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
};

// Classic Friedman statistic on average-tie ranks; p from the chi-square survival at k-1.
FriedmanResult friedman_test(const RankMatrix& rm, double alpha = 0.05);

struct Comparison {
  std::size_t classifier = 0;
  double z = 0.0;
  double p_value = 1.0;
};

// z = (Rj - Rc) / sqrt(k(k+1)/(6N)), two-sided normal p; one entry per non-control column.
std::vector<Comparison> posthoc_vs_control(const RankMatrix& rm, std::size_t control);

// Lowest average rank, lowest index on ties.
std::size_t select_control(const RankMatrix& rm);

// Critical values c_1..c_m of Rom's step-up procedure at level alpha.
std::vector<double> rom_critical_values(std::size_t m, double alpha);

struct RomResult {
  std::vector<double> adjusted;  // input order
  std::vector<bool> reject;      // adjusted < alpha
};

// Adjusted p of the hypothesis ranked j-th smallest: the smallest level at which the step-up
// procedure rejects it, capped at 1. Throws InputError for p outside [0, 1].
RomResult rom_adjust(const std::vector<double>& p_values, double alpha = 0.05);

}  // namespace procbench
