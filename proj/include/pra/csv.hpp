#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pra {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
std::string format_number(long value);

/// Header row first; fields containing separators, quotes or line breaks are
/// quoted with embedded quotes doubled.
void write_csv(const CsvTable& table, std::ostream& out);
void write_csv(const CsvTable& table, const std::string& path);

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::string& path);

}  // namespace pra
