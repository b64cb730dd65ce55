#include "orb/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace orb {

namespace {

std::string trim(const std::string& s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& raw) {
  std::size_t pos = 0;
  double v;
  try {
    v = std::stod(raw, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" + raw + "'");
  }
  if (pos != raw.size())
    throw std::invalid_argument("config: trailing characters in value of '" + key + "'");
  return v;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not of the form key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config: empty key on line " + std::to_string(lineno));
    if (c.kv_.count(key))
      throw std::invalid_argument("config: duplicate key '" + key + "'");
    c.kv_[key] = value;
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) { kv_[key] = value; }

double Config::get_real(const std::string& key, double fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  return parse_real(key, it->second);
}

long long Config::get_int(const std::string& key, long long fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  double v = parse_real(key, it->second);
  auto i = static_cast<long long>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("config: key '" + key + "' must be an integer");
  return i;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::vector<double> Config::get_real_list(const std::string& key,
                                          const std::vector<double>& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<double> out;
  std::istringstream in(it->second);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw std::invalid_argument("config: empty list element in '" + key + "'");
    out.push_back(parse_real(key, item));
  }
  if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is an empty list");
  return out;
}

std::vector<long long> Config::get_int_list(const std::string& key,
                                            const std::vector<long long>& fallback) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  std::vector<long long> out;
  for (double v : get_real_list(key, {})) {
    auto i = static_cast<long long>(v);
    if (static_cast<double>(i) != v)
      throw std::invalid_argument("config: key '" + key + "' must list integers");
    out.push_back(i);
  }
  return out;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : kv_)
    if (!allowed.count(key))
      throw std::invalid_argument("config: unknown key '" + key + "'");
}

}  // namespace orb
