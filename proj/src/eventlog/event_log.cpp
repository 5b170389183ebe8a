#include "procbench/eventlog/event_log.hpp"

#include <algorithm>
#include <unordered_set>

#include "procbench/util/errors.hpp"

namespace procbench {

EventLog::EventLog(std::string source_name, std::vector<Trace> traces,
                   std::vector<std::string> alphabet)
    : source_name_(std::move(source_name)), traces_(std::move(traces)),
      alphabet_(std::move(alphabet)) {
  std::unordered_set<std::string> case_ids;
  std::unordered_set<std::string> seen_types;
  for (const Trace& trace : traces_) {
    if (trace.events.empty()) throw DataError("trace '" + trace.case_id + "' has no events");
    if (!case_ids.insert(trace.case_id).second) {
      throw DataError("duplicate case id '" + trace.case_id + "'");
    }
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      const Event& e = trace.events[i];
      if (e.case_id != trace.case_id) {
        throw InternalError("event of case '" + e.case_id + "' inside trace '" + trace.case_id + "'");
      }
      if (e.event_type.empty()) throw DataError("empty event type in case '" + trace.case_id + "'");
      if (i > 0 && e.timestamp < trace.events[i - 1].timestamp) {
        throw InternalError("trace '" + trace.case_id + "' is not sorted by timestamp");
      }
      seen_types.insert(e.event_type);
    }
  }
  std::unordered_set<std::string> alphabet_set(alphabet_.begin(), alphabet_.end());
  if (alphabet_set.size() != alphabet_.size() || alphabet_set != seen_types) {
    throw InternalError("alphabet does not match the event types of log '" + source_name_ + "'");
  }
}

namespace {
std::vector<std::string> alphabet_of(const std::vector<Trace>& traces) {
  std::vector<std::string> alphabet;
  std::unordered_set<std::string> seen;
  for (const Trace& t : traces) {
    for (const Event& e : t.events) {
      if (seen.insert(e.event_type).second) alphabet.push_back(e.event_type);
    }
  }
  return alphabet;
}
}  // namespace

EventLog::EventLog(std::string source_name, std::vector<Trace> traces)
    : EventLog(std::move(source_name), traces, alphabet_of(traces)) {}

std::size_t EventLog::num_events() const noexcept {
  std::size_t n = 0;
  for (const Trace& t : traces_) n += t.events.size();
  return n;
}

std::string compose_event_type(std::string_view name, std::string_view lifecycle) {
  if (name.empty()) throw DataError("event name must not be empty");
  std::string out(name);
  if (!lifecycle.empty()) {
    out.push_back('+');
    out.append(lifecycle);
  }
  return out;
}

void EventLogBuilder::add(Event event) {
  if (event.event_type.empty()) throw DataError("empty event type");
  ++rows_;
  if (alphabet_index_.emplace(event.event_type, alphabet_.size()).second) {
    alphabet_.push_back(event.event_type);
  }
  auto [it, inserted] = trace_index_.emplace(event.case_id, traces_.size());
  if (inserted) traces_.push_back(Trace{event.case_id, {}});
  traces_[it->second].events.push_back(std::move(event));
}

EventLog EventLogBuilder::build() && {
  if (traces_.empty()) throw DataError("event log '" + source_name_ + "' contains no events");
  for (Trace& t : traces_) {
    std::stable_sort(t.events.begin(), t.events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
  }
  return EventLog(std::move(source_name_), std::move(traces_), std::move(alphabet_));
}

}  // namespace procbench
