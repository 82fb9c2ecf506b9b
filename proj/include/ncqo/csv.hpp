#pragma once

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ncqo {

// Decimal form of a double with 17 significant digits, enough to make the
// text round-trip to the identical bit pattern. Two runs that compute the
// same values therefore emit the same bytes.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A dataset with comment metadata, a header row and string cells. write()
// emits '#'-prefixed metadata lines, then the header, then the rows, every
// line terminated by '\n' regardless of platform.
struct csv_table {
  std::vector<std::string> metadata;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const {
    for (const std::string& line : metadata) out << "# " << line << '\n';
    write_row(out, header);
    for (const auto& row : rows) write_row(out, row);
  }

  std::string to_string() const {
    std::ostringstream out;
    write(out);
    return out.str();
  }

 private:
  static void write_row(std::ostream& out,
                        const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ',';
      out << cells[i];
    }
    out << '\n';
  }
};

}  // namespace ncqo
