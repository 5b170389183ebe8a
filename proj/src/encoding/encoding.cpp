#include "procbench/encoding/encoding.hpp"

#include <fstream>

#include "procbench/util/csv.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

CodeMap::CodeMap(std::vector<std::string> types) : types_(std::move(types)) {
  for (std::size_t i = 0; i < types_.size(); ++i) {
    if (!codes_.emplace(types_[i], static_cast<std::uint32_t>(i)).second) {
      throw InternalError("duplicate event type '" + types_[i] + "' in code map");
    }
  }
}

std::uint32_t CodeMap::code(const std::string& type) const {
  auto it = codes_.find(type);
  if (it == codes_.end()) throw InternalError("event type '" + type + "' missing from code map");
  return it->second;
}

const std::string& CodeMap::type(std::uint32_t code) const {
  if (code >= types_.size()) throw InternalError("code " + std::to_string(code) + " out of range");
  return types_[code];
}

double minutes_between(TimePoint from, TimePoint to) {
  return static_cast<double>((to - from).count()) / 60000.0;
}

std::vector<Window> generate_windows(const Trace& trace, std::size_t l) {
  if (l == 0) throw ConfigError("window size must be at least 1");
  std::vector<Window> out;
  const std::size_t n = trace.size();
  if (n <= l) return out;
  out.reserve(n - l);
  for (std::size_t i = l + 1; i <= n; ++i) out.push_back(Window{&trace, i, l});
  return out;
}

Sample encode_window(const Window& w, const CodeMap& code_map) {
  if (!w.trace || w.size == 0 || w.target_index <= w.size || w.target_index > w.trace->size()) {
    throw InternalError("window does not fit its trace");
  }
  const auto& ev = w.trace->events;
  const std::size_t first = w.target_index - w.size - 1;  // 0-based e_{i-l}
  const std::size_t last = w.target_index - 2;            // 0-based e_{i-1}
  Sample s;
  s.type_codes.reserve(w.size);
  for (std::size_t j = first; j <= last; ++j) s.type_codes.push_back(code_map.code(ev[j].event_type));
  s.duration = minutes_between(ev[first].timestamp, ev[last].timestamp);
  s.label_code = code_map.code(ev[w.target_index - 1].event_type);
  return s;
}

EncodedDataset encode_log(const EventLog& log, std::size_t l) {
  if (l == 0) throw ConfigError("window size must be at least 1");
  EncodedDataset d;
  d.window_size = l;
  d.code_map = CodeMap(log.alphabet());
  d.source = log.source_name();
  for (const Trace& t : log.traces()) {
    for (const Window& w : generate_windows(t, l)) d.samples.push_back(encode_window(w, d.code_map));
  }
  if (d.samples.empty()) {
    throw EmptyDatasetError("empty dataset: no trace of '" + log.source_name() + "' is longer than " +
                            std::to_string(l) + " events");
  }
  return d;
}

void write_encoded_csv(std::ostream& out, const EncodedDataset& data) {
  std::vector<std::string> row;
  for (std::size_t j = 1; j <= data.window_size; ++j) row.push_back("event_" + std::to_string(j));
  row.push_back("duration");
  row.push_back("next_event");
  csv::write_row(out, row);
  for (const Sample& s : data.samples) {
    row.clear();
    for (auto c : s.type_codes) row.push_back(data.code_map.type(c));
    row.push_back(csv::fixed(s.duration, 3));
    row.push_back(data.code_map.type(s.label_code));
    csv::write_row(out, row);
  }
}

void write_code_map(std::ostream& out, const CodeMap& code_map) {
  for (std::size_t i = 0; i < code_map.size(); ++i) {
    csv::write_row(out, {std::to_string(i), code_map.types()[i]});
  }
}

std::filesystem::path export_encoded(const EncodedDataset& data, const std::filesystem::path& dir,
                                     const std::string& stem) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (stem + ".csv");
  const auto map_path = dir / (stem + ".codes.csv");
  std::ofstream out(csv_path, std::ios::binary);
  std::ofstream map(map_path, std::ios::binary);
  if (!out || !map) throw DataError("cannot write to '" + dir.string() + "'");
  write_encoded_csv(out, data);
  write_code_map(map, data.code_map);
  return csv_path;
}

}  // namespace procbench
