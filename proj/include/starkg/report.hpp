#pragma once

#include <string>
#include <vector>

namespace starkg {

struct CheckRecord {
  std::string check;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Convenience constructor recording pass = (residual <= tolerance).
CheckRecord make_check(const std::string& name, double residual,
                       double tolerance);

/// Serializes the records to a stable JSON document:
/// {"checks": [{"check", "residual", "tolerance", "pass"}...], "all_pass"}.
void write_report(const std::string& path,
                  const std::vector<CheckRecord>& records);

bool all_pass(const std::vector<CheckRecord>& records);

}  // namespace starkg
