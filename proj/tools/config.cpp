#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace shpgr::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
  return s;
}

std::optional<double> to_double(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    // "pi" multiples are common in angle settings
    if (s == "pi") return 3.14159265358979323846;
    if (s.size() > 1 && s[0] == '-') {
      if (auto f = to_double(s.substr(1)); f && s[1] != '-') return -*f;
    }
    if (s.size() > 3 && s.substr(s.size() - 3) == "*pi") {
      if (auto f = to_double(s.substr(0, s.size() - 3))) {
        return *f * 3.14159265358979323846;
      }
    }
    if (s.size() > 3 && s.substr(0, 3) == "pi/") {
      if (auto f = to_double(s.substr(3)); f && *f != 0.0) {
        return 3.14159265358979323846 / *f;
      }
    }
    return std::nullopt;
  }
  return v;
}

}  // namespace

Config Config::parse(std::istream& in, const std::string& source) {
  Config c;
  c.source_ = source;
  try {
    pt::read_ini(in, c.tree_);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << source << ":" << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }
  for (const auto& [name, node] : c.tree_) {
    if (node.empty() && !node.data().empty()) {
      throw ConfigError(source + ": key '" + name +
                        "' must appear inside a [section]");
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

bool Config::has_section(const std::string& section) const {
  return tree_.find(section) != tree_.not_found();
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = tree_.find(section);
  if (s == tree_.not_found()) return false;
  return s->second.find(key) != s->second.not_found();
}

void Config::bad(const std::string& section, const std::string& key,
                 const std::string& what) const {
  throw ConfigError(source_ + ": [" + section + "] " + key + ": " + what);
}

std::string Config::raw(const std::string& section,
                        const std::string& key) const {
  return trim(tree_.get_child(section).get_child(key).data());
}

std::string Config::get_string(const std::string& section,
                               const std::string& key,
                               std::optional<std::string> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    bad(section, key, "missing required key");
  }
  return raw(section, key);
}

double Config::get_double(const std::string& section, const std::string& key,
                          std::optional<double> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    bad(section, key, "missing required key");
  }
  const auto v = to_double(raw(section, key));
  if (!v) bad(section, key, "expected a number, got '" + raw(section, key) + "'");
  return *v;
}

long long Config::get_int(const std::string& section, const std::string& key,
                          std::optional<long long> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    bad(section, key, "missing required key");
  }
  const std::string s = raw(section, key);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    bad(section, key, "expected an integer, got '" + s + "'");
  }
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      std::optional<bool> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    bad(section, key, "missing required key");
  }
  const std::string s = raw(section, key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad(section, key, "expected a boolean, got '" + s + "'");
}

std::vector<double> Config::get_list(
    const std::string& section, const std::string& key,
    std::optional<std::vector<double>> fallback) const {
  if (!has(section, key)) {
    if (fallback) return *fallback;
    bad(section, key, "missing required key");
  }
  std::vector<double> out;
  std::stringstream ss(raw(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = to_double(item);
    if (!v) bad(section, key, "bad list element '" + trim(item) + "'");
    out.push_back(*v);
  }
  if (out.empty()) bad(section, key, "empty list");
  return out;
}

Vec4 Config::get_vec4(const std::string& section, const std::string& key,
                      std::optional<Vec4> fallback) const {
  if (!has(section, key) && fallback) return *fallback;
  const std::vector<double> v = get_list(section, key);
  if (v.size() != 4) bad(section, key, "expected 4 comma-separated numbers");
  return Vec4(v[0], v[1], v[2], v[3]);
}

void Config::require_known(const KeySchema& schema) const {
  for (const auto& [section, node] : tree_) {
    const auto s = schema.find(section);
    if (s == schema.end()) {
      throw ConfigError(source_ + ": unknown section [" + section + "]");
    }
    for (const auto& [key, value] : node) {
      if (!s->second.contains(key)) {
        throw ConfigError(source_ + ": unknown key '" + key + "' in section [" +
                          section + "]");
      }
    }
  }
}

std::vector<std::pair<std::string, std::string>> Config::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [section, node] : tree_) {
    for (const auto& [key, value] : node) {
      out.emplace_back(section + "." + key, trim(value.data()));
    }
  }
  return out;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  tree_.put(pt::ptree::path_type(section + "/" + key, '/'), value);
}

}  // namespace shpgr::cli
