#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace morozov {

/// Raised for malformed or unknown configuration entries.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat INI-style file: `[section]` headers, `key = value` lines, `#` or `;`
/// comments, comma-separated lists. Keys are addressed as "section.key".
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text, const std::string& origin = "<string>");
  static ConfigFile load(const std::filesystem::path& path);

  /// Throws ConfigError naming the first key (with its line) not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key,
                                       const std::vector<std::string>& fallback) const;

 private:
  struct Entry {
    std::string value;
    int line;
  };
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

  std::string origin_;
  std::map<std::string, Entry> entries_;
};

std::vector<std::string> split_list(const std::string& text);
std::string trim(const std::string& s);

}  // namespace morozov
