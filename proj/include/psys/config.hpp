#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace psys {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

/// Plain-text `key = value` file with `[section]` headers and `#` comments.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<input>");
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated list of reals.
  std::vector<double> get_list(const std::string& section, const std::string& key, const std::vector<double>& fallback) const;

  /// Rejects sections or keys outside the allowed sets, naming the offending line.
  void restrict_keys(const std::map<std::string, std::set<std::string>>& allowed) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  const std::map<std::string, std::map<std::string, std::string>>& entries() const { return values_; }
  std::string source() const { return source_; }

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::map<std::string, std::map<std::string, int>> lines_;
  std::map<std::string, int> section_lines_;

  [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const;
};

}  // namespace psys
