#include "scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "experiments.hpp"
#include "shpgr/errors.hpp"

namespace shpgr::cli {

bool is_experiment(std::string_view name) {
  return std::find(std::begin(kExperiments), std::end(kExperiments), name) !=
         std::end(kExperiments);
}

ScenarioConfig load_scenario(const std::string& experiment,
                             const std::string& path,
                             std::optional<std::uint64_t> seed_override,
                             const std::filesystem::path& out_dir) {
  if (!is_experiment(experiment)) {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  ScenarioConfig s;
  s.experiment = experiment;
  s.config = Config::load(path);
  s.out_dir = out_dir;
  s.config.require_known(schema_for(experiment));

  const std::string declared =
      s.config.get_string("scenario", "experiment", experiment);
  if (declared != experiment) {
    throw ConfigError(path + ": [scenario] experiment = " + declared +
                      " does not match subcommand '" + experiment + "'");
  }
  const long long seed = s.config.get_int("scenario", "seed", 0);
  if (seed < 0) throw ConfigError(path + ": [scenario] seed must be >= 0");
  s.seed = seed_override ? *seed_override : static_cast<std::uint64_t>(seed);
  if (seed_override) s.config.set("scenario", "seed", std::to_string(*seed_override));
  validate_domain(s);
  return s;
}

void RunReport::check(std::string name, double residual, double tolerance) {
  checks.push_back({std::move(name), residual, tolerance, false,
                    std::isfinite(residual) && residual <= tolerance});
}

void RunReport::info(std::string name, double value) {
  checks.push_back({std::move(name), value, 0.0, true, true});
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.informational || c.pass; });
}

RunReport run(const ScenarioConfig& scenario) {
  RunReport r;
  r.experiment = scenario.experiment;
  r.seed = scenario.seed;
  r.echo = scenario.config.entries();
  const auto start = std::chrono::steady_clock::now();
  const std::string& e = scenario.experiment;
  try {
    if (e == "geodesic") run_geodesic(scenario, r);
    else if (e == "transport") run_transport(scenario, r);
    else if (e == "holonomy") run_holonomy(scenario, r);
    else if (e == "spin-verify") run_spin_verify(scenario, r);
    else if (e == "induce") run_induce(scenario, r);
    else if (e == "evolve") run_evolve(scenario, r);
    else if (e == "epr") run_epr(scenario, r);
    else if (e == "cover") run_cover(scenario, r);
    else throw ConfigError("unknown experiment '" + e + "'");
  } catch (const UsageError& ex) {
    throw ConfigError(std::string("invalid parameters: ") + ex.what());
  } catch (const DomainError& ex) {
    throw ConfigError(std::string("parameter outside the chart domain: ") + ex.what());
  } catch (const InvariantError& ex) {
    throw ConfigError(std::string("parameter violates an invariant: ") + ex.what());
  }
  r.wall_seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return r;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const Series& s) {
  for (std::size_t i = 0; i < s.columns.size(); ++i) {
    os << (i ? "," : "") << s.columns[i];
  }
  os << '\n';
  for (const auto& row : s.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << format_double(row[i]);
    }
    os << '\n';
  }
}

void write_plotdata(std::ostream& os, const Series& s,
                    const std::string& experiment) {
  os << "# shpgr " << experiment << " " << s.name << "\n# columns:";
  for (std::size_t i = 0; i < s.columns.size(); ++i) {
    os << "  " << (i + 1) << ":" << s.columns[i];
  }
  os << '\n';
  for (const auto& row : s.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? " " : "") << format_double(row[i]);
    }
    os << '\n';
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  return out;
}

}  // namespace

std::vector<std::filesystem::path> emit_plotdata(
    const RunReport& report, const std::vector<Series>& series,
    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  for (const Series& s : series) {
    const auto p = dir / (s.name + ".dat");
    auto out = open_out(p);
    write_plotdata(out, s, report.experiment);
    written.push_back(p);
  }
  return written;
}

std::vector<std::filesystem::path> emit_artifacts(
    const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const Series& s : report.tables) {
    const auto p = dir / (s.name + ".csv");
    auto out = open_out(p);
    write_csv(out, s);
    written.push_back(p);
  }
  {
    std::string name = report.experiment;
    std::replace(name.begin(), name.end(), '-', '_');
    const auto p = dir / (name + "_report.csv");
    auto out = open_out(p);
    out << "check,value,tolerance,status\n";
    for (const Check& c : report.checks) {
      out << c.name << ',' << format_double(c.value) << ','
          << (c.informational ? std::string("") : format_double(c.tolerance))
          << ',' << (c.informational ? "info" : (c.pass ? "pass" : "FAIL"))
          << '\n';
    }
    written.push_back(p);
  }
  const auto plots = emit_plotdata(report, report.plots, dir);
  written.insert(written.end(), plots.begin(), plots.end());
  return written;
}

void print_report(std::ostream& os, const RunReport& report) {
  os << "experiment: " << report.experiment << "  seed: " << report.seed << '\n';
  for (const auto& [k, v] : report.echo) os << "  " << k << " = " << v << '\n';
  std::size_t width = 5;
  for (const Check& c : report.checks) width = std::max(width, c.name.size());
  for (const Check& c : report.checks) {
    char line[256];
    if (c.informational) {
      std::snprintf(line, sizeof line, "  %-*s  %-12.6g %12s  info", int(width),
                    c.name.c_str(), c.value, "");
    } else {
      std::snprintf(line, sizeof line, "  %-*s  %-12.6g <= %-9.3g  %s",
                    int(width), c.name.c_str(), c.value, c.tolerance,
                    c.pass ? "pass" : "FAIL");
    }
    os << line << '\n';
  }
  char t[64];
  std::snprintf(t, sizeof t, "%.3f", report.wall_seconds);
  os << "result: " << (report.passed() ? "PASS" : "FAIL") << "  (" << t
     << " s)\n";
}

}  // namespace shpgr::cli
