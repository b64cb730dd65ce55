#ifndef ORB_CONFIG_HPP
#define ORB_CONFIG_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

namespace orb {

/// Flat key = value text configuration. '#' starts a comment, blank lines are
/// skipped, whitespace around keys and values is trimmed. Values are typed at
/// read time; lists are comma separated.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  double get_real(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_real_list(const std::string& key,
                                    const std::vector<double>& fallback) const;
  std::vector<long long> get_int_list(const std::string& key,
                                      const std::vector<long long>& fallback) const;

  /// Rejects any key outside the allowed set (typo guard).
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace orb

#endif
