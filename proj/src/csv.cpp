#include "jarzmle/csv.hpp"

#include <charconv>
#include <istream>
#include <stdexcept>
#include <system_error>

namespace jarzmle {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("double format failed");
  return std::string(buf, ptr);
}

double parse_double(std::string_view field) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw std::runtime_error("bad numeric field: '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

CsvContent read_csv(std::istream& in) {
  CsvContent content;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::size_t i = 1;
      while (i < line.size() && line[i] == ' ') ++i;
      content.comments.push_back(line.substr(i));
    } else {
      content.rows.push_back(split_csv_line(line));
    }
  }
  return content;
}

}  // namespace jarzmle
