#include "procbench/stats/report.hpp"

#include "procbench/util/csv.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

PosthocReport posthoc_report(const RankMatrix& rm, const std::vector<std::string>& classifiers, double alpha) {
  if (classifiers.size() != rm.classifiers()) throw InputError("classifier names do not match rank matrix width");
  const std::size_t control = select_control(rm);
  const auto cmp = posthoc_vs_control(rm, control);
  std::vector<double> p;
  for (const auto& c : cmp) p.push_back(c.p_value);
  const auto rom = rom_adjust(p, alpha);
  PosthocReport out;
  out.control = classifiers[control];
  out.alpha = alpha;
  for (std::size_t i = 0; i < cmp.size(); ++i) {
    out.rows.push_back(PosthocRow{classifiers[cmp[i].classifier], cmp[i].z, cmp[i].p_value, rom.adjusted[i], rom.reject[i]});
  }
  return out;
}

TestReport build_test_report(std::string group, std::string scheme, std::vector<std::string> classifiers,
                             const std::vector<std::vector<double>>& accuracies, double alpha) {
  const RankMatrix rm = rank_blocks(accuracies);
  if (classifiers.size() != rm.classifiers()) throw InputError("classifier names do not match accuracy columns");
  TestReport r;
  r.group = std::move(group);
  r.scheme = std::move(scheme);
  r.classifiers = std::move(classifiers);
  r.average_ranks = average_rank(rm);
  r.blocks = rm.blocks();
  r.friedman = friedman_test(rm, alpha);
  if (r.friedman.reject) r.posthoc = posthoc_report(rm, r.classifiers, alpha);
  return r;
}

std::string format_p(double p) {
  if (p < 0.0005) return "<0.001";
  return csv::fixed(p, 3);
}

namespace {
std::string bold_if(const std::string& s, bool on) { return on ? "**" + s + "**" : s; }
}  // namespace

void write_report_markdown(std::ostream& out, const TestReport& r) {
  out << "## " << r.scheme << " / " << r.group << "\n\n";
  out << "| Blocks | Classifiers | Chi-square | df | p-value | alpha | Decision |\n";
  out << "|---|---|---|---|---|---|---|\n";
  out << "| " << r.blocks << " | " << r.classifiers.size() << " | " << csv::fixed(r.friedman.chi2, 3) << " | "
      << r.friedman.degrees_of_freedom << " | " << format_p(r.friedman.p_value) << " | "
      << csv::fixed(r.friedman.alpha, 2) << " | " << (r.friedman.reject ? "H0 rejected" : "H0 not rejected")
      << " |\n\n";
  out << "| Classifier | Average rank |\n|---|---|\n";
  for (std::size_t j = 0; j < r.classifiers.size(); ++j) {
    out << "| " << r.classifiers[j] << " | " << csv::fixed(r.average_ranks[j], 2) << " |\n";
  }
  out << "\n";
  if (!r.posthoc) return;
  const auto& ph = *r.posthoc;
  out << "Control: " << ph.control << "\n\n";
  out << "| Classifier | z | Unadjusted p | Rom adjusted p |\n|---|---|---|---|\n";
  for (const auto& row : ph.rows) {
    out << "| " << row.classifier << " | " << csv::fixed(row.z, 3) << " | " << format_p(row.unadjusted) << " | "
        << bold_if(format_p(row.adjusted), row.significant) << " |\n";
  }
  out << "\nBold: significant at alpha = " << csv::fixed(ph.alpha, 2) << " after adjustment.\n\n";
}

void write_report_csv(std::ostream& out, const TestReport& r) {
  csv::write_row(out, {"group", "scheme", "section", "classifier", "statistic", "value"});
  auto row = [&](const std::string& section, const std::string& cls, const std::string& stat, const std::string& v) {
    csv::write_row(out, {r.group, r.scheme, section, cls, stat, v});
  };
  row("friedman", "", "blocks", std::to_string(r.blocks));
  row("friedman", "", "chi2", csv::fixed(r.friedman.chi2, 6));
  row("friedman", "", "df", std::to_string(r.friedman.degrees_of_freedom));
  row("friedman", "", "p", csv::fixed(r.friedman.p_value, 3));
  row("friedman", "", "reject", r.friedman.reject ? "1" : "0");
  for (std::size_t j = 0; j < r.classifiers.size(); ++j) {
    row("rank", r.classifiers[j], "average_rank", csv::fixed(r.average_ranks[j], 2));
  }
  if (!r.posthoc) return;
  row("posthoc", r.posthoc->control, "control", "1");
  for (const auto& p : r.posthoc->rows) {
    row("posthoc", p.classifier, "z", csv::fixed(p.z, 3));
    row("posthoc", p.classifier, "p_unadjusted", csv::fixed(p.unadjusted, 3));
    row("posthoc", p.classifier, "p_rom", csv::fixed(p.adjusted, 3));
    row("posthoc", p.classifier, "significant", p.significant ? "1" : "0");
  }
}

}  // namespace procbench
