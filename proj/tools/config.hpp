#pragma once

// key = value configuration with [sections], parsed with Boost's INI
// reader.  Typed getters report the offending section/key on failure.

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "shpgr/geometry.hpp"

namespace shpgr::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeySchema = std::map<std::string, std::set<std::string>>;

class Config {
 public:
  static Config parse(std::istream& in, const std::string& source = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get_string(const std::string& section, const std::string& key,
                         std::optional<std::string> fallback = {}) const;
  double get_double(const std::string& section, const std::string& key,
                    std::optional<double> fallback = {}) const;
  long long get_int(const std::string& section, const std::string& key,
                    std::optional<long long> fallback = {}) const;
  bool get_bool(const std::string& section, const std::string& key,
                std::optional<bool> fallback = {}) const;
  std::vector<double> get_list(const std::string& section,
                               const std::string& key,
                               std::optional<std::vector<double>> fallback = {}) const;
  Vec4 get_vec4(const std::string& section, const std::string& key,
                std::optional<Vec4> fallback = {}) const;

  // Throws ConfigError naming the first section or key not in the schema.
  void require_known(const KeySchema& schema) const;

  // section.key = value, in file order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

 private:
  std::string raw(const std::string& section, const std::string& key) const;
  [[noreturn]] void bad(const std::string& section, const std::string& key,
                        const std::string& what) const;

  boost::property_tree::ptree tree_;
  std::string source_;
};

}  // namespace shpgr::cli
