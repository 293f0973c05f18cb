#include "quatnav/cli/config_file.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "quatnav/errors.hpp"

namespace quatnav::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') {
      quoted = !quoted;
    } else if (s[i] == '#' && !quoted) {
      return s.substr(0, i);
    }
  }
  return s;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') {
    s.remove_prefix(1);
  }
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool valid_name(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      return false;
    }
  }
  return true;
}

}  // namespace

ConfigFile ConfigFile::parse(std::string_view text, std::string origin) {
  ConfigFile cfg;
  cfg.origin_ = std::move(origin);
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  auto error = [&](const std::string& what) {
    throw ConfigError(cfg.origin_ + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        error("unterminated section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!valid_name(section)) {
        error("invalid section name '" + section + "'");
      }
      if (cfg.section_lines_.count(section) != 0) {
        error("duplicate section [" + section + "]");
      }
      cfg.section_lines_[section] = line_no;
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      error("expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view rhs = trim(line.substr(eq + 1));
    if (!valid_name(key)) {
      error("invalid key '" + key + "'");
    }
    if (section.empty()) {
      error("key '" + key + "' outside of any section");
    }
    ConfigValue v;
    v.text = std::string(rhs);
    v.line = line_no;
    double number = 0.0;
    if (rhs.size() >= 2 && rhs.front() == '"' && rhs.back() == '"') {
      v.value = std::string(rhs.substr(1, rhs.size() - 2));
    } else if (rhs == "true" || rhs == "false") {
      v.value = rhs == "true";
    } else if (!rhs.empty() && rhs.front() == '[') {
      if (rhs.back() != ']') {
        error("unterminated array");
      }
      std::vector<double> values;
      std::string_view body = trim(rhs.substr(1, rhs.size() - 2));
      while (!body.empty()) {
        const auto comma = body.find(',');
        const std::string_view item = trim(body.substr(0, comma));
        if (!parse_number(item, number)) {
          error("array element '" + std::string(item) + "' is not a number");
        }
        values.push_back(number);
        if (comma == std::string_view::npos) {
          break;
        }
        body = trim(body.substr(comma + 1));
      }
      v.value = std::move(values);
    } else if (parse_number(rhs, number)) {
      v.value = number;
    } else {
      error("cannot parse value '" + std::string(rhs) + "'");
    }
    auto& keys = cfg.sections_[section];
    if (keys.count(key) != 0) {
      error("duplicate key '" + section + "." + key + "'");
    }
    keys.emplace(key, std::move(v));
    cfg.order_.emplace_back(section, key);
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file " + file.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), file.string());
}

std::string ConfigFile::echo() const {
  std::string out;
  for (const auto& [section, key] : order_) {
    out += section + "." + key + " = " + sections_.at(section).at(key).text + "\n";
  }
  return out;
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) != 0;
}

const ConfigValue* ConfigFile::find(const std::string& section, const std::string& key) const {
  used_.insert(section);
  const auto s = sections_.find(section);
  if (s == sections_.end()) {
    return nullptr;
  }
  const auto k = s->second.find(key);
  if (k == s->second.end()) {
    return nullptr;
  }
  used_.insert(section + "." + key);
  return &k->second;
}

void ConfigFile::fail(const ConfigValue& v, const std::string& key, const std::string& what) const {
  throw ConfigError(origin_ + ":" + std::to_string(v.line) + ": " + key + ": " + what);
}

double ConfigFile::number(const std::string& section, const std::string& key,
                          double fallback) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    return fallback;
  }
  if (const auto* d = std::get_if<double>(&v->value)) {
    return *d;
  }
  fail(*v, section + "." + key, "expected a number");
}

int ConfigFile::integer(const std::string& section, const std::string& key, int fallback) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    return fallback;
  }
  const auto* d = std::get_if<double>(&v->value);
  if (d == nullptr || *d != std::floor(*d) || std::abs(*d) > 2e9) {
    fail(*v, section + "." + key, "expected an integer");
  }
  return static_cast<int>(*d);
}

std::string ConfigFile::string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    return fallback;
  }
  if (const auto* s = std::get_if<std::string>(&v->value)) {
    return *s;
  }
  fail(*v, section + "." + key, "expected a quoted string");
}

bool ConfigFile::boolean(const std::string& section, const std::string& key, bool fallback) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    return fallback;
  }
  if (const auto* b = std::get_if<bool>(&v->value)) {
    return *b;
  }
  fail(*v, section + "." + key, "expected true or false");
}

Vec3 ConfigFile::vec3(const std::string& section, const std::string& key,
                      const Vec3& fallback) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    return fallback;
  }
  const auto* a = std::get_if<std::vector<double>>(&v->value);
  if (a == nullptr || a->size() != 3) {
    fail(*v, section + "." + key, "expected an array of 3 numbers");
  }
  return {(*a)[0], (*a)[1], (*a)[2]};
}

Vec4 ConfigFile::vec4(const std::string& section, const std::string& key,
                      const Vec4& fallback) const {
  const ConfigValue* v = find(section, key);
  if (v == nullptr) {
    return fallback;
  }
  const auto* a = std::get_if<std::vector<double>>(&v->value);
  if (a == nullptr || a->size() != 4) {
    fail(*v, section + "." + key, "expected an array of 4 numbers");
  }
  return {(*a)[0], (*a)[1], (*a)[2], (*a)[3]};
}

void ConfigFile::reject_unknown() const {
  for (const auto& [section, line] : section_lines_) {
    if (used_.count(section) == 0) {
      throw ConfigError(origin_ + ":" + std::to_string(line) + ": unknown section [" + section +
                        "]");
    }
  }
  for (const auto& [section, key] : order_) {
    if (used_.count(section + "." + key) == 0) {
      throw ConfigError(origin_ + ":" + std::to_string(sections_.at(section).at(key).line) +
                        ": unknown key '" + key + "' in [" + section + "]");
    }
  }
}

}  // namespace quatnav::cli
