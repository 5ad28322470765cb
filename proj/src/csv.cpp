#include "starkg/csv.hpp"

#include <cstdio>
#include <fstream>

#include "starkg/errors.hpp"

namespace starkg {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) os << ',';
    os << csv_escape(table.header[i]);
  }
  os << "\r\n";
  char buf[64];
  for (const auto& row : table.rows) {
    if (!table.header.empty() && row.size() != table.header.size())
      throw ConfigError("csv row width does not match the header: " + path);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      std::snprintf(buf, sizeof buf, "%.12g", row[i]);
      os << buf;
    }
    os << "\r\n";
  }
  if (!os) throw ConfigError("write failed: " + path);
}

}  // namespace starkg
