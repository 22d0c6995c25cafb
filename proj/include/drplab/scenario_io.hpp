#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "drplab/scenario.hpp"

namespace drplab {

// Reads a scenario document (YAML; schema in docs/scenario.example.yaml).
// The market block may carry inline arrays with a `start` timestamp,
// explicit calendar triples, or pv_file/price_file references to hourly
// series files resolved relative to the scenario's directory.
Scenario load_scenario(const std::string& path);

// Canonical serialized form; also what gets hashed for synth scenarios.
std::string scenario_to_yaml(const Scenario& s,
                             std::optional<std::int64_t> market_start_epoch = std::nullopt);

void save_scenario(const std::string& path, const Scenario& s,
                   std::optional<std::int64_t> market_start_epoch = std::nullopt);

}  // namespace drplab
