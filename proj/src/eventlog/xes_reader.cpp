#include <zlib.h>

#include <map>
#include <optional>
#include <unordered_map>
#include <string_view>
#include <vector>

#include <spdlog/spdlog.h>

#include "procbench/eventlog/readers.hpp"
#include "procbench/util/errors.hpp"

namespace procbench {

std::string read_maybe_gzip(const std::filesystem::path& path) {
  gzFile f = gzopen(path.string().c_str(), "rb");
  if (!f) throw DataError("cannot open event log '" + path.string() + "'");
  gzbuffer(f, 1 << 17);
  std::string out;
  std::string chunk(1 << 17, '\0');
  for (;;) {
    const int n = gzread(f, chunk.data(), static_cast<unsigned>(chunk.size()));
    if (n < 0) {
      int code = 0;
      std::string msg = gzerror(f, &code);
      gzclose(f);
      throw DataError("cannot read '" + path.string() + "': " + msg);
    }
    if (n == 0) break;
    out.append(chunk.data(), static_cast<std::size_t>(n));
  }
  gzclose(f);
  return out;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  if (s.find('&') == std::string_view::npos) return std::string(s);
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    const std::size_t end = s.find(';', i);
    if (end == std::string_view::npos) {
      out.push_back('&');
      continue;
    }
    const std::string_view ent = s.substr(i + 1, end - i - 1);
    if (ent == "amp") out.push_back('&');
    else if (ent == "lt") out.push_back('<');
    else if (ent == "gt") out.push_back('>');
    else if (ent == "quot") out.push_back('"');
    else if (ent == "apos") out.push_back('\'');
    else if (ent.size() > 1 && ent[0] == '#') {
      const bool hex = ent[1] == 'x' || ent[1] == 'X';
      const std::string digits(ent.substr(hex ? 2 : 1));
      try {
        append_utf8(out, std::stoul(digits, nullptr, hex ? 16 : 10));
      } catch (const std::exception&) {
        out.append(s.substr(i, end - i + 1));
      }
    } else {
      out.append(s.substr(i, end - i + 1));
    }
    i = end;
  }
  return out;
}

struct Tag {
  std::string_view name;
  std::vector<std::pair<std::string_view, std::string_view>> attrs;
  bool closing = false;
  bool self_closing = false;

  std::optional<std::string_view> get(std::string_view key) const {
    for (const auto& [k, v] : attrs) {
      if (k == key) return v;
    }
    return std::nullopt;
  }
};

// Pulls start/end tags out of an XML document; text content, comments, processing
// instructions and declarations are skipped.
class TagScanner {
 public:
  explicit TagScanner(std::string_view xml) : xml_(xml) {}

  bool next(Tag& tag) {
    for (;;) {
      const std::size_t lt = xml_.find('<', pos_);
      if (lt == std::string_view::npos) return false;
      pos_ = lt + 1;
      if (xml_.compare(pos_, 3, "!--") == 0) {
        pos_ = skip_past("-->");
      } else if (xml_.compare(pos_, 8, "![CDATA[") == 0) {
        pos_ = skip_past("]]>");
      } else if (pos_ < xml_.size() && xml_[pos_] == '?') {
        pos_ = skip_past("?>");
      } else if (pos_ < xml_.size() && xml_[pos_] == '!') {
        pos_ = skip_past(">");
      } else {
        parse_tag(tag);
        return true;
      }
    }
  }

  std::size_t line_at_cursor() const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < pos_ && i < xml_.size(); ++i) n += xml_[i] == '\n';
    return n;
  }

 private:
  std::size_t skip_past(std::string_view terminator) {
    const std::size_t at = xml_.find(terminator, pos_);
    if (at == std::string_view::npos) throw DataError("unterminated XML construct");
    return at + terminator.size();
  }

  void parse_tag(Tag& tag) {
    tag.attrs.clear();
    tag.closing = tag.self_closing = false;
    std::size_t p = pos_;
    if (p < xml_.size() && xml_[p] == '/') {
      tag.closing = true;
      ++p;
    }
    const std::size_t name_start = p;
    while (p < xml_.size() && !is_space(xml_[p]) && xml_[p] != '>' && xml_[p] != '/') ++p;
    tag.name = xml_.substr(name_start, p - name_start);
    for (;;) {
      while (p < xml_.size() && is_space(xml_[p])) ++p;
      if (p >= xml_.size()) throw DataError("unterminated XML tag <" + std::string(tag.name));
      if (xml_[p] == '>') {
        ++p;
        break;
      }
      if (xml_[p] == '/') {
        tag.self_closing = true;
        ++p;
        continue;
      }
      const std::size_t key_start = p;
      while (p < xml_.size() && xml_[p] != '=' && !is_space(xml_[p]) && xml_[p] != '>') ++p;
      const std::string_view key = xml_.substr(key_start, p - key_start);
      while (p < xml_.size() && is_space(xml_[p])) ++p;
      if (p >= xml_.size() || xml_[p] != '=') {
        throw DataError("malformed attribute '" + std::string(key) + "' in <" + std::string(tag.name) + ">");
      }
      ++p;
      while (p < xml_.size() && is_space(xml_[p])) ++p;
      if (p >= xml_.size() || (xml_[p] != '"' && xml_[p] != '\'')) {
        throw DataError("unquoted attribute value in <" + std::string(tag.name) + ">");
      }
      const char quote = xml_[p++];
      const std::size_t end = xml_.find(quote, p);
      if (end == std::string_view::npos) throw DataError("unterminated attribute value");
      tag.attrs.emplace_back(key, xml_.substr(p, end - p));
      p = end + 1;
    }
    pos_ = p;
  }

  std::string_view xml_;
  std::size_t pos_ = 0;
};

bool is_attribute_element(std::string_view name) {
  return name == "string" || name == "date" || name == "int" || name == "float" ||
         name == "boolean" || name == "id" || name == "list" || name == "container";
}

enum class Frame { log, trace, event, attribute, ignored };

struct PendingEvent {
  std::optional<std::string> name;
  std::string lifecycle;
  std::optional<TimePoint> timestamp;
  std::vector<std::pair<std::string, std::string>> attrs;
};

}  // namespace

EventLog parse_xes_log(std::string_view xml, const std::string& source_name,
                       const XesOptions& options) {
  const TimestampFormat iso = TimestampFormat::iso8601();
  TagScanner scanner(xml);
  EventLogBuilder builder(source_name);
  std::vector<Frame> stack;
  std::map<std::string, std::size_t> unsupported;

  std::optional<std::string> case_id;
  std::vector<PendingEvent> trace_events;
  PendingEvent event;
  std::size_t trace_count = 0;
  std::unordered_map<std::string, std::size_t> seen_ids;
  bool seen_log = false;

  auto flush_trace = [&] {
    ++trace_count;
    std::string id = case_id ? *case_id : "trace_" + std::to_string(trace_count);
    if (options.duplicates == DuplicateCases::keep) {
      const std::size_t repeat = seen_ids[id]++;
      if (repeat > 0) id += "#" + std::to_string(repeat);
    }
    if (!case_id) ++unsupported["trace without concept:name"];
    if (trace_events.empty()) ++unsupported["trace without events"];
    for (PendingEvent& pe : trace_events) {
      Event e;
      e.case_id = id;
      e.event_type = compose_event_type(*pe.name, options.compose_lifecycle ? pe.lifecycle : "");
      e.timestamp = *pe.timestamp;
      e.attrs = std::move(pe.attrs);
      builder.add(std::move(e));
    }
    trace_events.clear();
    case_id.reset();
  };

  Tag tag;
  while (scanner.next(tag)) {
    if (tag.closing) {
      if (stack.empty()) throw DataError("unbalanced closing tag </" + std::string(tag.name) + ">");
      const Frame f = stack.back();
      stack.pop_back();
      if (f == Frame::event) {
        if (!event.name || event.name->empty()) {
          throw DataError("event without concept:name near line " +
                          std::to_string(scanner.line_at_cursor()));
        }
        if (!event.timestamp) {
          throw DataError("event without a valid time:timestamp near line " +
                          std::to_string(scanner.line_at_cursor()));
        }
        trace_events.push_back(std::move(event));
        event = PendingEvent{};
      } else if (f == Frame::trace) {
        flush_trace();
      }
      continue;
    }

    const Frame parent = stack.empty() ? Frame::ignored : stack.back();
    Frame frame = Frame::ignored;
    if (stack.empty()) {
      if (tag.name != "log") throw DataError("XES root element must be <log>, got <" + std::string(tag.name) + ">");
      seen_log = true;
      frame = Frame::log;
    } else if (tag.name == "trace" && parent == Frame::log) {
      frame = Frame::trace;
    } else if (tag.name == "event" && parent == Frame::trace) {
      frame = Frame::event;
    } else if (is_attribute_element(tag.name) &&
               (parent == Frame::trace || parent == Frame::event)) {
      frame = Frame::attribute;
      const auto key = tag.get("key");
      const auto value = tag.get("value");
      if (key && value && tag.name != "list" && tag.name != "container") {
        const std::string k = decode_entities(*key);
        std::string v = decode_entities(*value);
        if (parent == Frame::trace) {
          if (k == "concept:name") case_id = std::move(v);
        } else if (k == "concept:name") {
          event.name = std::move(v);
        } else if (k == "lifecycle:transition") {
          event.lifecycle = std::move(v);
        } else if (k == "time:timestamp" && tag.name == "date") {
          event.timestamp = iso.parse(v);
          if (!event.timestamp) {
            throw DataError("cannot parse XES timestamp '" + v + "' near line " +
                            std::to_string(scanner.line_at_cursor()));
          }
        } else {
          event.attrs.emplace_back(k, std::move(v));
        }
      } else {
        ++unsupported["<" + std::string(tag.name) + "> attribute"];
      }
    } else if (parent == Frame::log &&
               (tag.name == "extension" || tag.name == "global" || tag.name == "classifier" ||
                is_attribute_element(tag.name))) {
      frame = Frame::ignored;  // header metadata
    } else if (parent == Frame::attribute) {
      ++unsupported["nested attribute"];
    } else if (parent != Frame::ignored) {
      ++unsupported["<" + std::string(tag.name) + "> inside <" +
                    (parent == Frame::log ? "log" : parent == Frame::trace ? "trace" : "event") + ">"];
    }
    if (!tag.self_closing) {
      stack.push_back(frame);
    } else if (frame == Frame::event) {
      throw DataError("empty <event/> element");
    } else if (frame == Frame::trace) {
      flush_trace();
    }
  }
  if (!seen_log) throw DataError("event log '" + source_name + "' contains no <log> element");
  if (!stack.empty()) throw DataError("event log '" + source_name + "' is truncated");
  for (const auto& [what, count] : unsupported) {
    spdlog::warn("{}: ignored {} x {}", source_name, count, what);
  }
  if (builder.rows() == 0) throw DataError("event log '" + source_name + "' has no events");
  return std::move(builder).build();
}

EventLog parse_xes_log(const std::filesystem::path& path, const XesOptions& options) {
  const std::string xml = read_maybe_gzip(path);
  if (xml.empty()) throw DataError("event log '" + path.string() + "' is empty");
  return parse_xes_log(xml, path.filename().string(), options);
}

}  // namespace procbench
