#include <doctest.h>

#include <cstdint>
#include <sstream>

#include "generators.hpp"
#include "procbench/encoding/encoding.hpp"
#include "procbench/eventlog/readers.hpp"
#include "procbench/ml/dataset.hpp"
#include "procbench/util/errors.hpp"

using namespace procbench;

namespace {

// The example log plus one continuation row per case (next events A and C).
const char* kToyLog =
    "case_id,event_type,timestamp\n"
    "173688,activity A,10/01/2011 19:45\n"
    "173688,activity B,10/01/2011 20:17\n"
    "173688,activity C,10/13/2011 18:37\n"
    "173688,activity A,10/14/2011 09:00\n"
    "173691,activity A,10/01/2011 19:43\n"
    "173691,activity B,10/01/2011 22:36\n"
    "173691,activity C,10/10/2011 19:30\n"
    "173691,activity C,10/10/2011 22:17\n"
    "173691,activity C,10/11/2011 08:00\n";

EventLog toy() {
  std::istringstream in(kToyLog);
  return parse_csv_log(in, "toy", {}, TimestampFormat::us_minutes());
}

Trace trace_of_length(std::size_t n) {
  Trace t{"t", {}};
  TimePoint ts{};
  for (std::size_t i = 0; i < n; ++i) {
    ts += std::chrono::minutes{5};
    t.events.push_back(Event{"t", "E" + std::to_string(i % 2), ts, {}});
  }
  return t;
}

std::vector<std::size_t> targets(const std::vector<Window>& ws) {
  std::vector<std::size_t> out;
  for (const auto& w : ws) out.push_back(w.target_index);
  return out;
}

}  // namespace

TEST_CASE("window generation follows the definition") {
  CHECK(targets(generate_windows(trace_of_length(5), 3)) == std::vector<std::size_t>{4, 5});
  CHECK(generate_windows(trace_of_length(3), 3).empty());
  CHECK(targets(generate_windows(trace_of_length(3), 2)) == std::vector<std::size_t>{3});
  CHECK(targets(generate_windows(trace_of_length(2), 1)) == std::vector<std::size_t>{2});
  CHECK_THROWS_AS(generate_windows(trace_of_length(3), 0), ConfigError);
}

TEST_CASE("toy log encoding reproduces the published durations") {
  const auto enc = encode_log(toy(), 3);
  REQUIRE(enc.samples.size() == 3);
  const auto& cm = enc.code_map;
  auto decoded = [&](const Sample& s) {
    std::vector<std::string> out;
    for (auto c : s.type_codes) out.push_back(cm.type(c));
    return out;
  };
  const std::vector<std::string> abc{"activity A", "activity B", "activity C"};
  CHECK(decoded(enc.samples[0]) == abc);
  CHECK(enc.samples[0].duration == doctest::Approx(17212.0));
  CHECK(cm.type(enc.samples[0].label_code) == "activity A");
  CHECK(decoded(enc.samples[1]) == abc);
  CHECK(enc.samples[1].duration == doctest::Approx(12947.0));
  CHECK(cm.type(enc.samples[1].label_code) == "activity C");
  CHECK(decoded(enc.samples[2]) == std::vector<std::string>{"activity B", "activity C", "activity C"});
  CHECK(enc.samples[2].duration == doctest::Approx(12941.0));
  CHECK(enc.num_features() == 4);
}

TEST_CASE("duration of a window sharing one timestamp is zero") {
  Trace t{"z", {}};
  const TimePoint ts{std::chrono::hours{1}};
  for (int i = 0; i < 4; ++i) t.events.push_back(Event{"z", "A", ts, {}});
  const CodeMap cm({"A"});
  CHECK(encode_window(Window{&t, 4, 3}, cm).duration == 0.0);
}

TEST_CASE("sub-minute durations are fractional") {
  CHECK(minutes_between(TimePoint{}, TimePoint{std::chrono::seconds{90}}) == doctest::Approx(1.5));
}

TEST_CASE("unknown event type is an internal error") {
  const auto t = trace_of_length(4);
  const CodeMap cm({"E0"});
  CHECK_THROWS_AS(encode_window(Window{&t, 4, 3}, cm), InternalError);
}

TEST_CASE("code map is a bijection in first-appearance order") {
  const auto log = toy();
  const auto enc = encode_log(log, 2);
  CHECK(enc.code_map.types() == log.alphabet());
  for (std::uint32_t c = 0; c < enc.code_map.size(); ++c) CHECK(enc.code_map.code(enc.code_map.type(c)) == c);
}

TEST_CASE("empty dataset is flagged") {
  try {
    encode_log(toy(), 5);
    FAIL("expected EmptyDatasetError");
  } catch (const EmptyDatasetError& e) {
    CHECK(std::string(e.what()).find("empty dataset") != std::string::npos);
  }
}

TEST_CASE("encoding invariants on random logs") {
  Rng rng(3);
  for (int c = 0; c < 300; ++c) {
    const auto log = testing::random_log(rng, 6, 10, 4);
    std::size_t prev = SIZE_MAX;
    for (std::size_t l = 1; l <= 10; ++l) {
      std::size_t count = 0;
      try {
        count = encode_log(log, l).samples.size();
      } catch (const EmptyDatasetError&) {
      }
      REQUIRE(count <= prev);  // non-increasing in l
      prev = count;
    }
    // Round trip of codes and translation invariance of durations.
    const std::size_t l = 1 + rng.index(3);
    EncodedDataset a;
    try {
      a = encode_log(log, l);
    } catch (const EmptyDatasetError&) {
      continue;
    }
    std::vector<Trace> shifted = log.traces();
    for (auto& t : shifted) {
      for (auto& e : t.events) e.timestamp += std::chrono::hours{24 * 365};
    }
    const auto b = encode_log(EventLog("shifted", std::move(shifted)), l);
    REQUIRE(a.samples.size() == b.samples.size());
    std::size_t i = 0;
    for (const auto& t : log.traces()) {
      for (const auto& w : generate_windows(t, l)) {
        const auto& s = a.samples[i];
        for (std::size_t k = 0; k < l; ++k) {
          REQUIRE(a.code_map.type(s.type_codes[k]) == t.events[w.target_index - 1 - l + k].event_type);
        }
        REQUIRE(a.code_map.type(s.label_code) == t.events[w.target_index - 1].event_type);
        REQUIRE(s.duration == b.samples[i].duration);
        REQUIRE(s.type_codes == b.samples[i].type_codes);
        ++i;
      }
    }
  }
}

TEST_CASE("csv export mirrors the final-format table") {
  const auto enc = encode_log(toy(), 3);
  std::ostringstream out;
  write_encoded_csv(out, enc);
  CHECK(out.str() ==
        "event_1,event_2,event_3,duration,next_event\n"
        "activity A,activity B,activity C,17212.000,activity A\n"
        "activity A,activity B,activity C,12947.000,activity C\n"
        "activity B,activity C,activity C,12941.000,activity C\n");
  std::ostringstream codes;
  write_code_map(codes, enc.code_map);
  CHECK(codes.str() == "0,activity A\n1,activity B\n2,activity C\n");
}

TEST_CASE("encoded dataset schema") {
  const auto enc = encode_log(toy(), 3);
  const Dataset d = to_dataset(enc);
  REQUIRE(d.size() == 3);
  REQUIRE(d.num_features() == 4);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(d.schema().features[f].kind == FeatureKind::nominal);
    CHECK(d.schema().features[f].arity == 3);
  }
  CHECK(d.schema().features[3].kind == FeatureKind::numeric);
  CHECK(d.schema().num_classes == 3);
  CHECK(d.value(0, 3) == doctest::Approx(17212.0));
}
