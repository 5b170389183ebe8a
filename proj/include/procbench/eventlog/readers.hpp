#pragma once

#include <filesystem>
#include <istream>
#include <string>

#include "procbench/eventlog/event_log.hpp"
#include "procbench/eventlog/timestamp.hpp"

namespace procbench {

// Column roles of a CSV log. When lifecycle is non-empty the event type is composed from
// the event_type (activity name) column and the lifecycle column.
struct ColumnSpec {
  std::string case_id = "case_id";
  std::string event_type = "event_type";
  std::string timestamp = "timestamp";
  std::string lifecycle;
};

// Every column that is not mapped to a role ends up in Event::attrs.
EventLog parse_csv_log(std::istream& in, const std::string& source_name, const ColumnSpec& columns,
                       const TimestampFormat& format = TimestampFormat::iso8601());
EventLog parse_csv_log(const std::filesystem::path& path, const ColumnSpec& columns,
                       const TimestampFormat& format = TimestampFormat::iso8601());

enum class DuplicateCases {
  merge,  // events of traces sharing a case id form one trace
  keep,   // the k-th repeat of an id becomes "<id>#k"
};

struct XesOptions {
  // Event type = concept:name + "+" + lifecycle:transition when set.
  bool compose_lifecycle = false;
  DuplicateCases duplicates = DuplicateCases::merge;
};

// Minimal XES import: <trace>/<event> elements with string/date/int/float/boolean attributes.
// concept:name, lifecycle:transition and time:timestamp are interpreted; everything else is
// kept as an attribute or skipped with a warning. Gzip-compressed files are detected by
// their magic bytes.
EventLog parse_xes_log(std::string_view xml, const std::string& source_name,
                       const XesOptions& options = {});
EventLog parse_xes_log(const std::filesystem::path& path, const XesOptions& options = {});

// Reads a whole file, transparently inflating gzip content.
std::string read_maybe_gzip(const std::filesystem::path& path);

}  // namespace procbench
