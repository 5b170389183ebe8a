#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "generators.hpp"
#include "procbench/eventlog/readers.hpp"
#include "procbench/eventlog/variability.hpp"
#include "procbench/util/errors.hpp"

using namespace procbench;

namespace {

const char* kExampleLog =
    "case_id,event_type,timestamp\n"
    "173688,activity A,10/01/2011 19:45\n"
    "173688,activity B,10/01/2011 20:17\n"
    "173688,activity C,10/13/2011 18:37\n"
    "173691,activity A,10/01/2011 19:43\n"
    "173691,activity B,10/01/2011 22:36\n"
    "173691,activity C,10/10/2011 19:30\n"
    "173691,activity C,10/10/2011 22:17\n";

EventLog parse(const std::string& text, const ColumnSpec& cols = {},
               const TimestampFormat& fmt = TimestampFormat::us_minutes()) {
  std::istringstream in(text);
  return parse_csv_log(in, "test", cols, fmt);
}

std::vector<std::string> types_of(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.events) out.push_back(e.event_type);
  return out;
}

EventLog repeated_log(const std::vector<std::pair<std::vector<std::string>, int>>& variants) {
  std::vector<Trace> traces;
  int id = 0;
  for (const auto& [seq, count] : variants) {
    for (int c = 0; c < count; ++c) {
      Trace t{"c" + std::to_string(id++), {}};
      TimePoint ts{};
      for (const auto& a : seq) {
        ts += std::chrono::minutes{1};
        t.events.push_back(Event{t.case_id, a, ts, {}});
      }
      traces.push_back(std::move(t));
    }
  }
  return EventLog("synthetic", std::move(traces));
}

const std::filesystem::path kData = PROCBENCH_DATA_DIR;

}  // namespace

TEST_CASE("three ordered rows of one case form one trace") {
  const auto log = parse("case_id,event_type,timestamp\nx,A,01/01/2020 10:00\nx,B,01/01/2020 10:05\nx,C,01/01/2020 11:00\n");
  REQUIRE(log.traces().size() == 1);
  CHECK(log.traces()[0].size() == 3);
  CHECK(types_of(log.traces()[0]) == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("the example log yields two traces of lengths 3 and 4") {
  const auto log = parse(kExampleLog);
  REQUIRE(log.traces().size() == 2);
  CHECK(log.traces()[0].case_id == "173688");
  CHECK(log.traces()[0].size() == 3);
  CHECK(log.traces()[1].case_id == "173691");
  CHECK(log.traces()[1].size() == 4);
  CHECK(log.alphabet() == std::vector<std::string>{"activity A", "activity B", "activity C"});
  CHECK(log.num_events() == 7);
}

TEST_CASE("shuffled rows are sorted by timestamp within a case") {
  Rng rng(5);
  for (int round = 0; round < 50; ++round) {
    std::vector<std::pair<int, std::string>> rows;  // minute offset, type
    for (int i = 0; i < 12; ++i) rows.emplace_back(static_cast<int>(rng.index(40)), "T" + std::to_string(rng.index(4)));
    std::string text = "case_id,event_type,timestamp\n";
    for (const auto& [m, t] : rows) {
      text += "k," + t + ",2020-01-01T" + (m / 60 < 10 ? "0" : "") + std::to_string(m / 60) + ":" +
              (m % 60 < 10 ? "0" : "") + std::to_string(m % 60) + "\n";
    }
    const auto log = parse(text, {}, TimestampFormat::iso8601());
    auto ref = rows;
    std::stable_sort(ref.begin(), ref.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> expect;
    for (const auto& r : ref) expect.push_back(r.second);
    REQUIRE(types_of(log.traces()[0]) == expect);
  }
}

TEST_CASE("tied timestamps keep file order") {
  const auto log = parse("case_id,event_type,timestamp\nx,B,01/01/2020 10:00\nx,A,01/01/2020 10:00\nx,C,01/01/2020 09:00\n");
  CHECK(types_of(log.traces()[0]) == std::vector<std::string>{"C", "B", "A"});
}

TEST_CASE("csv reader errors") {
  SUBCASE("bad timestamp carries the line number") {
    try {
      parse("case_id,event_type,timestamp\nx,A,01/01/2020 10:00\nx,B,not a date\n");
      FAIL("expected RowError");
    } catch (const RowError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("missing mandatory column is a config error") {
    CHECK_THROWS_AS(parse("case,event_type,timestamp\nx,A,01/01/2020 10:00\n"), ConfigError);
  }
  SUBCASE("empty file is a data error") {
    CHECK_THROWS_AS(parse(""), DataError);
    CHECK_THROWS_AS(parse("case_id,event_type,timestamp\n"), DataError);
  }
  SUBCASE("ragged row") {
    CHECK_THROWS_AS(parse("case_id,event_type,timestamp\nx,A\n"), RowError);
  }
}

TEST_CASE("custom column names, lifecycle composition and attributes") {
  ColumnSpec cols;
  cols.case_id = "Case";
  cols.event_type = "Activity";
  cols.timestamp = "Time";
  cols.lifecycle = "Life";
  const auto log = parse("Case,Activity,Life,Time,Resource\n1,A_SUBMITTED,COMPLETE,2011-10-01 10:00,112\n1,W_Call,,2011-10-01 10:30,113\n",
                         cols, TimestampFormat::iso8601());
  const auto& t = log.traces()[0];
  CHECK(t.events[0].event_type == "A_SUBMITTED+COMPLETE");
  CHECK(t.events[1].event_type == "W_Call");
  REQUIRE(t.events[0].attrs.size() == 1);
  CHECK(t.events[0].attrs[0] == std::pair<std::string, std::string>{"Resource", "112"});
}

TEST_CASE("compose_event_type") {
  CHECK(compose_event_type("A_SUBMITTED", "COMPLETE") == "A_SUBMITTED+COMPLETE");
  CHECK(compose_event_type("Queued", "") == "Queued");
  CHECK_THROWS_AS(compose_event_type("", "COMPLETE"), DataError);
}

TEST_CASE("timestamp formats") {
  const auto iso = TimestampFormat::iso8601();
  const auto a = iso.parse("2011-10-01T19:45:00.000+02:00");
  const auto b = iso.parse("2011-10-01T17:45:00Z");
  REQUIRE(a);
  REQUIRE(b);
  CHECK(*a == *b);
  CHECK(iso.parse("2011-10-01 17:45") == b);
  CHECK_FALSE(iso.parse("2011-13-01T00:00"));
  CHECK_FALSE(iso.parse("yesterday"));
  const auto us = TimestampFormat::us_minutes();
  CHECK(us.parse("10/01/2011 17:45") == b);
  CHECK_FALSE(us.parse("10/01/2011"));
  const TimestampFormat custom("dd.MM.yyyy HH:mm:ss");
  CHECK(custom.parse("01.10.2011 17:45:00") == b);
}

TEST_CASE("xes import: traces, lifecycle, attributes and skipped constructs") {
  const std::string xml = R"(<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0">
  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>
  <global scope="event"><string key="concept:name" value="x"/></global>
  <!-- a comment <trace> -->
  <trace>
    <string key="concept:name" value="case &amp; 1"/>
    <event>
      <string key="concept:name" value="A"/>
      <string key="lifecycle:transition" value="start"/>
      <date key="time:timestamp" value="2020-01-01T10:00:00.000+01:00"/>
      <string key="org:resource" value="r1"/>
    </event>
    <event>
      <string key="concept:name" value="A"/>
      <string key="lifecycle:transition" value="complete"/>
      <date key="time:timestamp" value="2020-01-01T10:30:00.000+01:00"/>
      <list key="ignored"><string key="x" value="y"/></list>
    </event>
  </trace>
  <trace>
    <string key="concept:name" value="2"/>
    <event>
      <string key="concept:name" value="B"/>
      <date key="time:timestamp" value="2020-01-02T10:00:00"/>
    </event>
  </trace>
</log>)";
  const auto plain = parse_xes_log(xml, "x");
  REQUIRE(plain.traces().size() == 2);
  CHECK(plain.traces()[0].case_id == "case & 1");
  CHECK(plain.alphabet() == std::vector<std::string>{"A", "B"});
  CHECK(plain.traces()[0].events[0].attrs.size() >= 1);
  XesOptions opt;
  opt.compose_lifecycle = true;
  const auto composed = parse_xes_log(xml, "x", opt);
  CHECK(composed.alphabet() == std::vector<std::string>{"A+start", "A+complete", "B"});
}

TEST_CASE("xes duplicate case ids") {
  const std::string xml = R"(<log>
<trace><string key="concept:name" value="1"/><event><string key="concept:name" value="A"/><date key="time:timestamp" value="2020-01-01T10:00:00"/></event></trace>
<trace><string key="concept:name" value="1"/><event><string key="concept:name" value="B"/><date key="time:timestamp" value="2020-01-01T11:00:00"/></event></trace>
</log>)";
  const auto merged = parse_xes_log(xml, "x");
  REQUIRE(merged.traces().size() == 1);
  CHECK(merged.traces()[0].size() == 2);
  XesOptions keep;
  keep.duplicates = DuplicateCases::keep;
  const auto kept = parse_xes_log(xml, "x", keep);
  REQUIRE(kept.traces().size() == 2);
  CHECK(kept.traces()[1].case_id == "1#1");
}

TEST_CASE("xes event without timestamp is a data error") {
  const std::string xml = R"(<log><trace><string key="concept:name" value="1"/><event><string key="concept:name" value="A"/></event></trace></log>)";
  CHECK_THROWS_AS(parse_xes_log(xml, "x"), DataError);
}

TEST_CASE("variability of a single-variant log") {
  const auto log = repeated_log({{{"A", "B", "C"}, 10}});
  const auto p = profile_variability(log);
  CHECK(p.num_variants == 1);
  CHECK(p.variants_to_80pct == 1);
  CHECK(p.ratio == doctest::Approx(1.0));
  CHECK(p.level == VariabilityLevel::High);
}

TEST_CASE("variability coverage rules") {
  // 50 + 30 + 10 + 10 cases: 80% is reached exactly by the first two variants.
  const auto log = repeated_log({{{"A"}, 50}, {{"B"}, 30}, {{"C"}, 10}, {{"D"}, 10}});
  const auto reach = profile_variability(log, 0.1, CoverageRule::reaches_target);
  CHECK(reach.variants_to_80pct == 2);
  CHECK(reach.ratio == doctest::Approx(0.5));
  const auto below = profile_variability(log, 0.1, CoverageRule::below_target);
  CHECK(below.variants_to_80pct == 1);
  const auto all = profile_variability(log, 0.1, CoverageRule::reaches_target, 1.0);
  CHECK(all.variants_to_80pct == all.num_variants);
  CHECK(reach.mean_trace_len == doctest::Approx(1.0));
  CHECK(reach.num_cases == 100);
}

TEST_CASE("variability threshold decides the level") {
  std::vector<std::pair<std::vector<std::string>, int>> v{{{"A"}, 90}};
  for (int i = 0; i < 20; ++i) v.push_back({{"B", "X" + std::to_string(i)}, 1});
  const auto log = repeated_log(v);
  const auto p = profile_variability(log);
  CHECK(p.num_variants == 21);
  CHECK(p.ratio == doctest::Approx(1.0 / 21));
  CHECK(p.level == VariabilityLevel::Low);
  CHECK(profile_variability(log, 0.01).level == VariabilityLevel::High);
}

TEST_CASE("log invariants on random logs") {
  Rng rng(11);
  for (int c = 0; c < 300; ++c) {
    const auto log = testing::random_log(rng);
    std::size_t total = 0;
    for (const auto& t : log.traces()) total += t.size();
    REQUIRE(total == log.num_events());
    const auto p = profile_variability(log);
    REQUIRE(p.ratio > 0.0);
    REQUIRE(p.ratio <= 1.0);
    REQUIRE(profile_variability(log, 0.1, CoverageRule::reaches_target, 1.0).variants_to_80pct == p.num_variants);
    // Reversing trace order keeps the profile when variant frequencies are distinct.
    std::map<std::vector<std::string>, int> freq;
    for (const auto& t : log.traces()) ++freq[types_of(t)];
    std::set<int> distinct;
    for (const auto& [k, f] : freq) distinct.insert(f);
    if (distinct.size() == freq.size()) {
      std::vector<Trace> rev(log.traces().rbegin(), log.traces().rend());
      const auto q = profile_variability(EventLog("rev", std::move(rev)));
      REQUIRE(q.variants_to_80pct == p.variants_to_80pct);
      REQUIRE(q.num_variants == p.num_variants);
    }
  }
}

TEST_CASE("public logs: BPIC2012 composed alphabet and Sepsis variants") {
  const auto bpic = kData / "bpic2012.xes.gz";
  const auto sepsis = kData / "sepsis.xes.gz";
  if (!std::filesystem::exists(bpic) || !std::filesystem::exists(sepsis)) {
    MESSAGE("public logs not present; run tools/fetch_public_logs.sh");
    return;
  }
  XesOptions opt;
  opt.compose_lifecycle = true;
  CHECK(parse_xes_log(bpic, opt).alphabet().size() == 36);
  const auto p = profile_variability(parse_xes_log(sepsis), 0.1, CoverageRule::below_target);
  CHECK(p.num_variants == 846);
  CHECK(p.variants_to_80pct == 635);
  CHECK(p.level == VariabilityLevel::High);
}
