#pragma once

#include <cstddef>
#include <string_view>

#include "procbench/eventlog/event_log.hpp"

namespace procbench {

enum class VariabilityLevel { Low, High };

std::string_view to_string(VariabilityLevel level);

// How many of the most frequent variants count as "covering" the target share of cases.
enum class CoverageRule {
  reaches_target,  // smallest prefix whose cumulative coverage is >= target
  below_target,    // variants whose cumulative coverage is still < target (at least 1)
};

struct VariabilityProfile {
  std::size_t num_cases = 0;
  std::size_t num_events = 0;
  std::size_t num_event_types = 0;
  std::size_t num_variants = 0;
  std::size_t variants_to_80pct = 0;
  double ratio = 0.0;
  double mean_trace_len = 0.0;
  double median_trace_len = 0.0;
  VariabilityLevel level = VariabilityLevel::High;
};

inline constexpr double kDefaultVariabilityThreshold = 0.1;

VariabilityProfile profile_variability(const EventLog& log,
                                       double low_high_threshold = kDefaultVariabilityThreshold,
                                       CoverageRule rule = CoverageRule::reaches_target,
                                       double coverage = 0.8);

}  // namespace procbench
