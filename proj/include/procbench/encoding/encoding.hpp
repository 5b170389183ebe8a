#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "procbench/eventlog/event_log.hpp"

namespace procbench {

// Bijection between event types and integer codes 0..n-1.
class CodeMap {
 public:
  CodeMap() = default;
  explicit CodeMap(std::vector<std::string> types);

  std::size_t size() const noexcept { return types_.size(); }
  // Throws InternalError for an unknown type.
  std::uint32_t code(const std::string& type) const;
  bool contains(const std::string& type) const { return codes_.count(type) != 0; }
  const std::string& type(std::uint32_t code) const;
  const std::vector<std::string>& types() const noexcept { return types_; }

 private:
  std::vector<std::string> types_;
  std::unordered_map<std::string, std::uint32_t> codes_;
};

// The window ending just before event `target_index` (1-based) with `size` events.
struct Window {
  const Trace* trace = nullptr;
  std::size_t target_index = 0;
  std::size_t size = 0;
};

struct Sample {
  std::vector<std::uint32_t> type_codes;
  double duration = 0.0;  // minutes
  std::uint32_t label_code = 0;
};

struct EncodedDataset {
  std::vector<Sample> samples;
  std::size_t window_size = 0;
  CodeMap code_map;
  std::string source;

  std::size_t num_features() const noexcept { return window_size + 1; }
};

std::vector<Window> generate_windows(const Trace& trace, std::size_t l);
Sample encode_window(const Window& w, const CodeMap& code_map);
// Throws EmptyDatasetError when no trace is longer than l.
EncodedDataset encode_log(const EventLog& log, std::size_t l);

// Duration in minutes between two instants, fractional below a minute.
double minutes_between(TimePoint from, TimePoint to);

// CSV with header event_1..event_l,duration,next_event; nominal columns hold event types.
void write_encoded_csv(std::ostream& out, const EncodedDataset& data);
// One "code,event_type" line per code.
void write_code_map(std::ostream& out, const CodeMap& code_map);
// Writes <stem>.csv and <stem>.codes.csv; returns the dataset path.
std::filesystem::path export_encoded(const EncodedDataset& data, const std::filesystem::path& dir,
                                     const std::string& stem);

}  // namespace procbench
