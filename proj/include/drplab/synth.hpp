#pragma once

#include <cstdint>
#include <string>

#include "drplab/scenario.hpp"

namespace drplab {

enum class SynthProfile { Winter, Summer };

SynthProfile synth_profile_from_string(const std::string& name);
std::string to_string(SynthProfile p);

// First market timestamp of the generated two-day window (UTC epoch seconds).
std::int64_t synth_start_epoch(SynthProfile p);

// Deterministic desk-scale scenario: sinusoid-plus-noise PV (zero at night,
// lower winter peak), a diurnal price curve with an evening peak, and three
// users whose revenue-optimal price conflicts with their satisfaction in
// winter but not in summer. Same (seed, profile) always yields the same
// scenario, bit for bit.
Scenario synth_scenario(std::uint64_t seed, SynthProfile profile);

}  // namespace drplab
