#pragma once

// Scenario runner behind the command-line tool: one experiment per call,
// a report of named residual checks, CSV artifacts and plot data.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"

namespace shpgr::cli {

inline constexpr std::string_view kExperiments[] = {
    "geodesic", "transport", "holonomy", "spin-verify",
    "induce",   "evolve",    "epr",      "cover"};

bool is_experiment(std::string_view name);

struct ScenarioConfig {
  std::string experiment;
  Config config;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
};

// Reads the file, applies the seed override and validates all keys and
// domain guards.  Throws ConfigError.
ScenarioConfig load_scenario(const std::string& experiment,
                             const std::string& path,
                             std::optional<std::uint64_t> seed_override,
                             const std::filesystem::path& out_dir);

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool informational = false;  // reported, never fails the run
  bool pass = true;
};

// Rectangular numeric table with named columns.
struct Series {
  std::string name;                  // file stem
  std::vector<std::string> columns;  // "name [unit]"
  std::vector<std::vector<double>> rows;
};

struct RunReport {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> echo;
  std::vector<Check> checks;
  std::vector<Series> tables;  // written as CSV
  std::vector<Series> plots;   // written as plot data
  double wall_seconds = 0.0;

  // residual <= tolerance
  void check(std::string name, double residual, double tolerance);
  void info(std::string name, double value);
  bool passed() const;
};

// Runs the experiment and fills the report; throws ConfigError for
// parameters rejected by the modules.
RunReport run(const ScenarioConfig& scenario);

// CSV with a header row and %.17g numbers.
void write_csv(std::ostream& os, const Series& s);
// Whitespace separated columns with '#' header lines.
void write_plotdata(std::ostream& os, const Series& s,
                    const std::string& experiment);

// Writes <name>.csv for every table, <name>.dat for every plot series and
// <experiment>_report.csv; returns the paths written.
std::vector<std::filesystem::path> emit_artifacts(
    const RunReport& report, const std::filesystem::path& dir);
std::vector<std::filesystem::path> emit_plotdata(
    const RunReport& report, const std::vector<Series>& series,
    const std::filesystem::path& dir);

void print_report(std::ostream& os, const RunReport& report);

std::string format_double(double v);

}  // namespace shpgr::cli
