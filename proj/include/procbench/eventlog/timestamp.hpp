#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace procbench {

// Instants are kept in UTC at millisecond resolution; local times without an offset are
// taken as UTC, which leaves every within-trace duration unchanged.
using TimePoint = std::chrono::sys_time<std::chrono::milliseconds>;

// A timestamp layout. "iso8601" accepts YYYY-MM-DD[T| ]hh:mm[:ss[.fff]][Z|+hh:mm|-hh:mm].
// Any other string is a pattern made of the tokens yyyy MM dd HH mm ss SSS and literal
// characters, e.g. "MM/dd/yyyy HH:mm".
class TimestampFormat {
 public:
  TimestampFormat() = default;
  explicit TimestampFormat(std::string pattern);

  static TimestampFormat iso8601() { return TimestampFormat{}; }
  static TimestampFormat us_minutes() { return TimestampFormat{"MM/dd/yyyy HH:mm"}; }

  std::optional<TimePoint> parse(std::string_view text) const;
  const std::string& pattern() const noexcept { return pattern_; }

 private:
  std::string pattern_ = "iso8601";
};

std::string format_iso8601(TimePoint t);

}  // namespace procbench
