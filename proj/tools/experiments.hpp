#pragma once

#include "scenario.hpp"

namespace shpgr::cli {

// Allowed sections and keys for each experiment.
KeySchema schema_for(const std::string& experiment);

// Parameter guards that can be checked without running anything.
void validate_domain(const ScenarioConfig& scenario);

void run_geodesic(const ScenarioConfig& s, RunReport& r);
void run_transport(const ScenarioConfig& s, RunReport& r);
void run_holonomy(const ScenarioConfig& s, RunReport& r);
void run_spin_verify(const ScenarioConfig& s, RunReport& r);
void run_induce(const ScenarioConfig& s, RunReport& r);
void run_evolve(const ScenarioConfig& s, RunReport& r);
void run_epr(const ScenarioConfig& s, RunReport& r);
void run_cover(const ScenarioConfig& s, RunReport& r);

}  // namespace shpgr::cli
