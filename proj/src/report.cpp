#include "starkg/report.hpp"

#include <fstream>

#include <json.hpp>

#include "starkg/errors.hpp"

namespace starkg {

CheckRecord make_check(const std::string& name, double residual,
                       double tolerance) {
  return CheckRecord{name, residual, tolerance, residual <= tolerance};
}

bool all_pass(const std::vector<CheckRecord>& records) {
  for (const auto& r : records)
    if (!r.pass) return false;
  return true;
}

void write_report(const std::string& path,
                  const std::vector<CheckRecord>& records) {
  nlohmann::ordered_json doc;
  doc["checks"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json item;
    item["check"] = r.check;
    item["residual"] = r.residual;
    item["tolerance"] = r.tolerance;
    item["pass"] = r.pass;
    doc["checks"].push_back(std::move(item));
  }
  doc["all_pass"] = all_pass(records);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open for writing: " + path);
  os << doc.dump(2) << '\n';
  if (!os) throw ConfigError("write failed: " + path);
}

}  // namespace starkg
