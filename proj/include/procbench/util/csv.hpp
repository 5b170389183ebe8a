#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace procbench::csv {

// RFC 4180 record reader: comma separated, double-quote quoting, CRLF or LF line ends,
// quoted fields may span lines. A UTF-8 byte order mark on the first record is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Returns false at end of input. line() is the line on which the record started.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t current_line_ = 1;
  std::size_t record_line_ = 0;
  bool first_ = true;
};

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Fixed-point formatting independent of the global locale.
std::string fixed(double value, int decimals);

}  // namespace procbench::csv
