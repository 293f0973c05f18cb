#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "quatnav/geometry.hpp"

namespace quatnav::cli {

/// A TOML subset: [section] headers, key = value lines, `#` comments.
/// Values are numbers, "strings", true/false, or flat arrays of numbers.
struct ConfigValue {
  std::variant<double, std::string, bool, std::vector<double>> value;
  std::string text;  ///< as written, for echoing
  int line = 0;
};

class ConfigFile {
 public:
  static ConfigFile parse(std::string_view text, std::string origin);
  static ConfigFile load(const std::filesystem::path& file);

  const std::string& origin() const { return origin_; }
  /// Normalized "section.key = value" lines in file order.
  std::string echo() const;

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key, double fallback) const;
  int integer(const std::string& section, const std::string& key, int fallback) const;
  std::string string(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  bool boolean(const std::string& section, const std::string& key, bool fallback) const;
  Vec3 vec3(const std::string& section, const std::string& key, const Vec3& fallback) const;
  Vec4 vec4(const std::string& section, const std::string& key, const Vec4& fallback) const;

  /// Throws ConfigError naming the first section or key never read.
  void reject_unknown() const;

 private:
  const ConfigValue* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const ConfigValue& v, const std::string& key, const std::string& what) const;

  std::string origin_;
  std::map<std::string, std::map<std::string, ConfigValue>> sections_;
  std::vector<std::pair<std::string, std::string>> order_;
  std::map<std::string, int> section_lines_;
  mutable std::set<std::string> used_;
};

}  // namespace quatnav::cli
