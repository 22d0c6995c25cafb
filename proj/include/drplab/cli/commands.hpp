#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drplab/cli/manifest.hpp"
#include "drplab/market_env.hpp"
#include "drplab/oracle.hpp"
#include "drplab/scenario.hpp"
#include "drplab/td3/agent.hpp"

namespace drplab::cli {

// Exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;

struct ScenarioSource {
    std::string path;           // --scenario
    std::string synth_profile;  // --synth winter|summer
    std::uint64_t synth_seed = 0;

    bool is_synth() const { return path.empty(); }
};

// Materializes the scenario and its content hash (file bytes, or the
// canonical serialized form for synthetic ones).
std::pair<Scenario, std::string> resolve_scenario(const ScenarioSource& src);

// Default output root: --out wins, then $DRLAB_OUT, then ./out.
std::string resolve_out_dir(const std::string& out_flag, const std::string& leaf);

struct TrainArgs {
    ScenarioSource scenario;
    std::string out;
    int seeds = 1;
    int jobs = 1;
    td3::AgentConfig agent;
    bool penalty_off = false;
};

struct EvaluateArgs {
    ScenarioSource scenario;
    std::string checkpoint;
    std::string out;
    int episodes = 1;
};

struct CertifyArgs {
    ScenarioSource scenario;
    std::string checkpoint;
    std::string out;
    oracle::GridSpec grid;
    int soc_levels = 33;
};

struct SensitivityArgs {
    ScenarioSource scenario;
    std::string out;
    int seeds = 1;
    int jobs = 1;
    td3::AgentConfig agent;
    std::vector<std::pair<double, double>> pairs;  // (eta_lin, eta_sqr)
};

struct ExportArgs {
    std::string from;  // a previous train/sensitivity output directory
    std::string out;   // defaults to <from>/export
};

struct SynthArgs {
    std::string profile;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_train(const TrainArgs& args);
int cmd_train_from_manifest(const std::string& manifest_path);
int cmd_evaluate(const EvaluateArgs& args);
int cmd_certify(const CertifyArgs& args);
int cmd_sensitivity(const SensitivityArgs& args);
int cmd_export(const ExportArgs& args);
int cmd_synth(const SynthArgs& args);

// Zeroes the beta/eta penalty parameters; the documented --penalty-off.
Scenario with_penalty_off(Scenario s);

// Shared trace table: one row per period, schema identical for environment
// rollouts, evaluation traces, and oracle traces.
void write_trace_csv(const std::string& path, const Scenario& s,
                     const std::vector<StepOutcome>& trace, const std::string& tag);

// Metrics log: one JSON object per line, one file per run.
void write_metrics_jsonl(const std::string& path,
                         const std::vector<td3::EpisodeRecord>& records,
                         const std::string& tag);
std::vector<td3::EpisodeRecord> read_metrics_jsonl(const std::string& path);

}  // namespace drplab::cli
