#pragma once

#include <string>
#include <vector>

namespace starkg {

/// Rectangular numeric table; complex quantities are stored as re/im column
/// pairs by the callers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Quotes per RFC 4180 when the field contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

/// Writes the table with CRLF line endings and 12 significant digits.
void write_csv(const std::string& path, const CsvTable& table);

}  // namespace starkg
