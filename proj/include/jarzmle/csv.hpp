#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace jarzmle {

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

// Strict double parse; throws std::runtime_error on trailing garbage.
double parse_double(std::string_view field);

std::vector<std::string> split_csv_line(std::string_view line);

// Reads all non-empty lines, keeping '#' comment lines separate from rows.
struct CsvContent {
  std::vector<std::string> comments;  // leading '#' stripped
  std::vector<std::vector<std::string>> rows;
};
CsvContent read_csv(std::istream& in);

}  // namespace jarzmle
