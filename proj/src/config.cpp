#include "psys/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace psys {

ConfigError::ConfigError(const std::string& source, int line, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  auto b = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto e = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); }).base();
  return b < e ? std::string(b, e) : std::string();
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '.'; });
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  c.source_ = source;
  std::string line, section;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_name(section)) throw ConfigError(source, no, "invalid section name '" + section + "'");
      c.section_lines_.emplace(section, no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, no, "expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_name(key)) throw ConfigError(source, no, "invalid key '" + key + "'");
    if (value.empty()) throw ConfigError(source, no, "empty value for '" + key + "'");
    if (c.values_[section].count(key)) throw ConfigError(source, no, "duplicate key '" + key + "'");
    c.values_[section][key] = value;
    c.lines_[section][key] = no;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "cannot open config file");
  return parse(f, path);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  return it != values_.end() && it->second.count(key);
}

std::string Config::get(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? values_.at(section).at(key) : fallback;
}

void Config::fail(const std::string& section, const std::string& key, const std::string& msg) const {
  int line = 0;
  auto it = lines_.find(section);
  if (it != lines_.end() && it->second.count(key)) line = it->second.at(key);
  throw ConfigError(source_, line, msg);
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(section, key, "'" + key + "' expects a number, got '" + v + "'");
  }
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail(section, key, "'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(section, key, "'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  std::stringstream ss(get(section, key, ""));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(section, key, "'" + key + "' expects a comma-separated list of numbers");
    }
  }
  return out;
}

void Config::restrict_keys(const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& [section, kv] : values_) {
    auto it = allowed.find(section);
    if (it == allowed.end()) {
      auto sl = section_lines_.find(section);
      throw ConfigError(source_, sl == section_lines_.end() ? 0 : sl->second, "unknown section '" + section + "'");
    }
    for (const auto& [key, value] : kv)
      if (!it->second.count(key)) fail(section, key, "unknown key '" + key + "' in section [" + section + "]");
  }
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

}  // namespace psys
