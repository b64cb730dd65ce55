#ifndef ORB_REPORT_HPP
#define ORB_REPORT_HPP

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace orb {

/// Structured run record plus CSV side files for curves. The serialized
/// output is byte-stable for identical inputs: key order is insertion order,
/// numbers use shortest round-trip formatting, and no wall-clock data is
/// stored (timings go to the console, not the report).
struct RunReport {
  nlohmann::ordered_json record;
  std::map<std::string, std::string> curves;  // file name -> CSV contents

  void check(const std::string& name, bool pass);
  bool all_passed() const;

  /// Writes record.json and every curve file into out_dir. The directory must
  /// already exist; a missing directory is an error raised before any write.
  void write(const std::string& out_dir) const;
};

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// CSV assembly from equally long columns.
std::string csv_table(const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns);

}  // namespace orb

#endif
