#include "procbench/eventlog/timestamp.hpp"

#include <array>
#include <cstdio>

#include "procbench/util/errors.hpp"

namespace procbench {
namespace {

using namespace std::chrono;

bool read_digits(std::string_view s, std::size_t& pos, int count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (int i = 0; i < count; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

struct Civil {
  int year = 1970, month = 1, day = 1, hour = 0, minute = 0, second = 0, millis = 0;
  int offset_minutes = 0;
};

std::optional<TimePoint> to_time_point(const Civil& c) {
  if (c.month < 1 || c.month > 12 || c.hour > 23 || c.minute > 59 || c.second > 60) {
    return std::nullopt;
  }
  const year_month_day ymd{year{c.year}, month{static_cast<unsigned>(c.month)},
                           day{static_cast<unsigned>(c.day)}};
  if (!ymd.ok()) return std::nullopt;
  const auto t = sys_days{ymd} + hours{c.hour} + minutes{c.minute} + seconds{c.second} +
                 milliseconds{c.millis} - minutes{c.offset_minutes};
  return time_point_cast<milliseconds>(t);
}

std::optional<TimePoint> parse_iso(std::string_view s) {
  Civil c;
  std::size_t p = 0;
  if (!read_digits(s, p, 4, c.year) || p >= s.size() || s[p++] != '-') return std::nullopt;
  if (!read_digits(s, p, 2, c.month) || p >= s.size() || s[p++] != '-') return std::nullopt;
  if (!read_digits(s, p, 2, c.day)) return std::nullopt;
  if (p == s.size()) return to_time_point(c);
  if (s[p] != 'T' && s[p] != ' ') return std::nullopt;
  ++p;
  if (!read_digits(s, p, 2, c.hour) || p >= s.size() || s[p++] != ':') return std::nullopt;
  if (!read_digits(s, p, 2, c.minute)) return std::nullopt;
  if (p < s.size() && s[p] == ':') {
    ++p;
    if (!read_digits(s, p, 2, c.second)) return std::nullopt;
    if (p < s.size() && (s[p] == '.' || s[p] == ',')) {
      ++p;
      int scale = 100;
      bool any = false;
      while (p < s.size() && s[p] >= '0' && s[p] <= '9') {
        c.millis += (s[p] - '0') * scale;
        scale /= 10;
        ++p;
        any = true;
      }
      if (!any) return std::nullopt;
    }
  }
  if (p == s.size()) return to_time_point(c);
  if (s[p] == 'Z' && p + 1 == s.size()) return to_time_point(c);
  if (s[p] == '+' || s[p] == '-') {
    const int sign = s[p] == '+' ? 1 : -1;
    ++p;
    int oh = 0, om = 0;
    if (!read_digits(s, p, 2, oh)) return std::nullopt;
    if (p < s.size() && s[p] == ':') ++p;
    if (p < s.size() && !read_digits(s, p, 2, om)) return std::nullopt;
    if (p != s.size()) return std::nullopt;
    c.offset_minutes = sign * (oh * 60 + om);
    return to_time_point(c);
  }
  return std::nullopt;
}

std::optional<TimePoint> parse_pattern(std::string_view pattern, std::string_view s) {
  struct Token {
    std::string_view text;
    int width;
    int Civil::*field;
  };
  static const std::array<Token, 7> tokens{{{"yyyy", 4, &Civil::year},
                                            {"SSS", 3, &Civil::millis},
                                            {"MM", 2, &Civil::month},
                                            {"dd", 2, &Civil::day},
                                            {"HH", 2, &Civil::hour},
                                            {"mm", 2, &Civil::minute},
                                            {"ss", 2, &Civil::second}}};
  Civil c;
  std::size_t pp = 0, sp = 0;
  while (pp < pattern.size()) {
    bool matched = false;
    for (const auto& tok : tokens) {
      if (pattern.substr(pp, tok.text.size()) == tok.text) {
        if (!read_digits(s, sp, tok.width, c.*tok.field)) return std::nullopt;
        pp += tok.text.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (sp >= s.size() || s[sp] != pattern[pp]) return std::nullopt;
    ++sp;
    ++pp;
  }
  if (sp != s.size()) return std::nullopt;
  return to_time_point(c);
}

}  // namespace

TimestampFormat::TimestampFormat(std::string pattern) : pattern_(std::move(pattern)) {
  if (pattern_.empty()) throw ConfigError("empty timestamp pattern");
}

std::optional<TimePoint> TimestampFormat::parse(std::string_view text) const {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (pattern_ == "iso8601") return parse_iso(text);
  return parse_pattern(pattern_, text);
}

std::string format_iso8601(TimePoint t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                static_cast<int>(tod.subseconds().count()));
  return buf;
}

}  // namespace procbench
