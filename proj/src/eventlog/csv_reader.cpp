#include <fstream>
#include <optional>
#include <unordered_map>
#include <vector>

#include "procbench/eventlog/readers.hpp"
#include "procbench/util/csv.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

namespace {

std::size_t require_column(const std::unordered_map<std::string, std::size_t>& header,
                           const std::string& role, const std::string& name) {
  if (name.empty()) throw ConfigError("no column configured for role '" + role + "'");
  auto it = header.find(name);
  if (it == header.end()) {
    throw ConfigError("missing " + role + " column '" + name + "' in CSV header");
  }
  return it->second;
}

}  // namespace

EventLog parse_csv_log(std::istream& in, const std::string& source_name, const ColumnSpec& columns,
                       const TimestampFormat& format) {
  csv::Reader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header) || (header.size() == 1 && header[0].empty())) {
    throw DataError("event log '" + source_name + "' is empty");
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index.emplace(header[i], i);

  const std::size_t c_case = require_column(index, "case_id", columns.case_id);
  const std::size_t c_type = require_column(index, "event_type", columns.event_type);
  const std::size_t c_time = require_column(index, "timestamp", columns.timestamp);
  std::optional<std::size_t> c_life;
  if (!columns.lifecycle.empty()) c_life = require_column(index, "lifecycle", columns.lifecycle);

  EventLogBuilder builder(source_name);
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != header.size()) {
      throw RowError(reader.line(), "expected " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(row.size()));
    }
    auto ts = format.parse(row[c_time]);
    if (!ts) {
      throw RowError(reader.line(),
                     "cannot parse timestamp '" + row[c_time] + "' as " + format.pattern());
    }
    if (row[c_case].empty()) throw RowError(reader.line(), "empty case id");
    if (row[c_type].empty()) throw RowError(reader.line(), "empty event type");
    Event e;
    e.case_id = row[c_case];
    e.event_type = c_life ? compose_event_type(row[c_type], row[*c_life]) : row[c_type];
    e.timestamp = *ts;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i == c_case || i == c_type || i == c_time || (c_life && i == *c_life)) continue;
      e.attrs.emplace_back(header[i], row[i]);
    }
    builder.add(std::move(e));
  }
  if (builder.rows() == 0) throw DataError("event log '" + source_name + "' has no event rows");
  return std::move(builder).build();
}

EventLog parse_csv_log(const std::filesystem::path& path, const ColumnSpec& columns,
                       const TimestampFormat& format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open event log '" + path.string() + "'");
  return parse_csv_log(in, path.filename().string(), columns, format);
}

}  // namespace procbench
