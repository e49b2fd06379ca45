#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "scenario.hpp"

int main(int argc, char** argv) {
  using namespace shpgr::cli;
  CLI::App app{"shpgr: spin and parallel transport scenarios"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  for (std::string_view name : kExperiments) {
    CLI::App* sub = app.add_subcommand(std::string(name), "run the " + std::string(name) + " scenario");
    sub->add_option("--config", config_path, "INI scenario file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "override [scenario] seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    const ScenarioConfig sc = load_scenario(experiment, config_path, seed, out_dir);
    const RunReport report = run(sc);
    emit_artifacts(report, sc.out_dir);
    print_report(std::cout, report);
    return report.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
