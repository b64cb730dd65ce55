#include "orb/report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace orb {

void RunReport::check(const std::string& name, bool pass) {
  if (!record.contains("assertions")) record["assertions"] = nlohmann::ordered_json::array();
  record["assertions"].push_back({{"name", name}, {"pass", pass}});
}

bool RunReport::all_passed() const {
  if (!record.contains("assertions")) return true;
  for (const auto& a : record["assertions"])
    if (!a["pass"].get<bool>()) return false;
  return true;
}

void RunReport::write(const std::string& out_dir) const {
  namespace fs = std::filesystem;
  if (!fs::is_directory(out_dir))
    throw std::runtime_error("report: output directory '" + out_dir +
                             "' does not exist; nothing was written");
  {
    std::ofstream out(fs::path(out_dir) / "record.json", std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot open record.json for writing");
    out << record.dump(2) << "\n";
  }
  for (const auto& [name, contents] : curves) {
    std::ofstream out(fs::path(out_dir) / name, std::ios::binary);
    if (!out) throw std::runtime_error("report: cannot open " + name + " for writing");
    out << contents;
  }
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string csv_table(const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns) {
  if (headers.size() != columns.size())
    throw std::invalid_argument("csv_table: header/column count mismatch");
  std::string out;
  for (std::size_t c = 0; c < headers.size(); ++c) {
    if (c) out += ',';
    out += headers[c];
  }
  out += '\n';
  std::size_t rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& col : columns)
    if (col.size() != rows) throw std::invalid_argument("csv_table: ragged columns");
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace orb
