#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drplab/td3/agent.hpp"

namespace drplab::cli {

// Everything needed to reproduce a run. Written to <out>/manifest.json
// before any run output; every artifact carries its short hash. No
// timestamps, so an identical configuration writes an identical manifest.
struct Manifest {
    std::string command;
    std::string scenario_path;  // empty when synthetic
    std::string synth_profile;  // empty when file-based
    std::uint64_t synth_seed = 0;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    std::string scenario_hash;
    td3::AgentConfig agent;
    bool penalty_off = false;
    std::vector<std::pair<double, double>> sensitivity_pairs;  // sensitivity only

    std::string to_json() const;
    static Manifest from_json(const std::string& text);

    // Hash of the manifest body itself; the tag output files carry.
    std::string short_tag() const;
};

void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

}  // namespace drplab::cli
