#pragma once

#include <map>
#include <set>
#include <string>

namespace aep {

// Flat `key = value` configuration text: one pair per line, '#' comments,
// blank lines ignored. Typed getters record which keys were consumed so a
// caller can reject unknown keys after reading everything it understands.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_text(const std::string& text);  // ConfigError on bad lines
  static KeyValueConfig parse_file(const std::string& path);  // IoError when unreadable

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);  // true/false/1/0

  // Keys present in the text but never consumed by a getter.
  std::set<std::string> unconsumed() const;

 private:
  const std::string& raw(const std::string& key);  // marks consumed

  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

}  // namespace aep
