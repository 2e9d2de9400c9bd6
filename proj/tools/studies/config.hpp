#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qmkdv::studies {

// Flat key-value configuration. Lines are "key = value"; "[section]" prefixes
// following keys with "section."; '#' starts a comment. Every lookup marks the
// key as used so that misspelled keys can be reported.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

  void set(const std::string& key, const std::string& value);

  // Keys present in the file but never read; reported as a config error.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const noexcept { return values_; }

 private:
  std::optional<std::string> raw(const std::string& key) const;
  std::map<std::string, std::string> values_;
  std::string origin_;
  mutable std::set<std::string> used_;
};

}  // namespace qmkdv::studies
