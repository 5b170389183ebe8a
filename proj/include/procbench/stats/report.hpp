#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "procbench/stats/tests.hpp"

namespace procbench {

struct PosthocRow {
  std::string classifier;
  double z = 0.0;
  double unadjusted = 1.0;
  double adjusted = 1.0;
  bool significant = false;
};

struct PosthocReport {
  std::string control;
  double alpha = 0.05;
  std::vector<PosthocRow> rows;  // column order, control excluded
};

struct TestReport {
  std::string group;
  std::string scheme;
  std::vector<std::string> classifiers;
  std::vector<double> average_ranks;
  std::size_t blocks = 0;
  FriedmanResult friedman;
  std::optional<PosthocReport> posthoc;  // only when the omnibus test rejects
};

// accuracies: one row per block, one column per classifier.
TestReport build_test_report(std::string group, std::string scheme, std::vector<std::string> classifiers,
                             const std::vector<std::vector<double>>& accuracies, double alpha = 0.05);

PosthocReport posthoc_report(const RankMatrix& rm, const std::vector<std::string>& classifiers, double alpha);

// p-values below the printable range are written as "<0.001".
std::string format_p(double p);

void write_report_markdown(std::ostream& out, const TestReport& r);
// Long format: section,classifier,statistic,value.
void write_report_csv(std::ostream& out, const TestReport& r);

}  // namespace procbench
