#include "procbench/eventlog/variability.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "procbench/util/errors.hpp"

namespace procbench {

std::string_view to_string(VariabilityLevel level) {
  return level == VariabilityLevel::Low ? "Low" : "High";
}

VariabilityProfile profile_variability(const EventLog& log, double low_high_threshold,
                                       CoverageRule rule, double coverage) {
  if (log.empty()) throw DataError("cannot profile an empty log");
  if (!(coverage > 0.0 && coverage <= 1.0)) throw ConfigError("coverage must lie in (0, 1]");

  std::unordered_map<std::string, std::size_t> code;
  for (const auto& t : log.alphabet()) code.emplace(t, code.size());

  struct Variant {
    std::size_t count = 0;
    std::size_t first = 0;
  };
  std::map<std::vector<std::size_t>, Variant> variants;
  std::vector<std::size_t> lengths;
  lengths.reserve(log.traces().size());
  std::size_t events = 0;
  for (std::size_t i = 0; i < log.traces().size(); ++i) {
    const Trace& t = log.traces()[i];
    std::vector<std::size_t> seq;
    seq.reserve(t.size());
    for (const Event& e : t.events) seq.push_back(code.at(e.event_type));
    auto [it, inserted] = variants.try_emplace(std::move(seq), Variant{0, i});
    ++it->second.count;
    lengths.push_back(t.size());
    events += t.size();
  }

  std::vector<Variant> ordered;
  ordered.reserve(variants.size());
  for (const auto& [seq, v] : variants) ordered.push_back(v);
  std::sort(ordered.begin(), ordered.end(), [](const Variant& a, const Variant& b) {
    return a.count != b.count ? a.count > b.count : a.first < b.first;
  });

  const std::size_t cases = log.traces().size();
  // Integer comparison: cumulative / cases >= coverage  <=>  cumulative >= coverage * cases.
  const double target = coverage * static_cast<double>(cases);
  std::size_t reach = 0;
  std::size_t cumulative = 0;
  while (reach < ordered.size()) {
    cumulative += ordered[reach].count;
    ++reach;
    if (static_cast<double>(cumulative) >= target - 1e-9) break;
  }
  std::size_t to_target = reach;
  if (rule == CoverageRule::below_target) {
    to_target = std::max<std::size_t>(1, reach - 1);
  }

  VariabilityProfile p;
  p.num_cases = cases;
  p.num_events = events;
  p.num_event_types = log.alphabet().size();
  p.num_variants = ordered.size();
  p.variants_to_80pct = to_target;
  p.ratio = static_cast<double>(to_target) / static_cast<double>(ordered.size());
  p.mean_trace_len = static_cast<double>(events) / static_cast<double>(cases);
  std::sort(lengths.begin(), lengths.end());
  const std::size_t mid = cases / 2;
  p.median_trace_len = cases % 2 == 1
                           ? static_cast<double>(lengths[mid])
                           : 0.5 * static_cast<double>(lengths[mid - 1] + lengths[mid]);
  p.level = p.ratio < low_high_threshold ? VariabilityLevel::Low : VariabilityLevel::High;
  return p;
}

}  // namespace procbench
