#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "procbench/eventlog/timestamp.hpp"

namespace procbench {

struct Event {
  std::string case_id;
  std::string event_type;
  TimePoint timestamp;
  std::vector<std::pair<std::string, std::string>> attrs;
};

struct Trace {
  std::string case_id;
  std::vector<Event> events;

  std::size_t size() const noexcept { return events.size(); }
};

// An immutable collection of traces plus the event-type alphabet, in first-appearance order.
class EventLog {
 public:
  // Validates: non-empty traces, shared case ids, non-decreasing timestamps, unique case ids,
  // and an alphabet that is exactly the set of event types occurring in the traces.
  EventLog(std::string source_name, std::vector<Trace> traces, std::vector<std::string> alphabet);
  // Alphabet derived from the traces in trace/event order.
  EventLog(std::string source_name, std::vector<Trace> traces);

  const std::vector<Trace>& traces() const noexcept { return traces_; }
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
  const std::string& source_name() const noexcept { return source_name_; }

  std::size_t num_events() const noexcept;
  bool empty() const noexcept { return traces_.empty(); }

 private:
  std::string source_name_;
  std::vector<Trace> traces_;
  std::vector<std::string> alphabet_;
};

// Joins an activity name and a lifecycle transition with '+'; an empty lifecycle yields name.
std::string compose_event_type(std::string_view name, std::string_view lifecycle);

// Collects events in input order and assembles traces: grouped by case id in order of first
// appearance, each trace stably sorted by timestamp so tied events keep input order.
class EventLogBuilder {
 public:
  explicit EventLogBuilder(std::string source_name) : source_name_(std::move(source_name)) {}

  void add(Event event);
  std::size_t rows() const noexcept { return rows_; }
  EventLog build() &&;

 private:
  std::string source_name_;
  std::vector<Trace> traces_;
  std::unordered_map<std::string, std::size_t> trace_index_;
  std::vector<std::string> alphabet_;
  std::unordered_map<std::string, std::size_t> alphabet_index_;
  std::size_t rows_ = 0;
};

}  // namespace procbench
