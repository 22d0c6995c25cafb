#pragma once

#include <functional>
#include <memory>
#include <string>

#include "drplab/approx/archive.hpp"
#include "drplab/approx/networks.hpp"
#include "drplab/market_env.hpp"
#include "drplab/td3/replay_buffer.hpp"

namespace drplab::td3 {

struct AgentConfig {
    double gamma = 0.99;
    double lr_actor = 1e-5;
    double lr_critic = 1e-5;
    int batch = 100;
    std::size_t buffer_capacity = 1000000;
    int policy_delay = 2;
    double tau = 0.005;
    double exploration_noise_sigma = 0.1;
    double target_noise_sigma = 0.2;
    double target_noise_clip = 0.5;
    long warmup_steps = 1000;
    long total_steps = 200000;
    approx::ExtractorKind extractor = approx::ExtractorKind::Mbtf;
    int lstm_hidden = 16;
    int fused_dim = 64;
    int scalar_hidden = 8;
    // Batch kernels run under OpenMP when true; results are identical either
    // way because per-sample gradients reduce in sample order.
    bool parallel_kernels = true;
};

struct EpisodeRecord {
    std::uint64_t seed = 0;
    int episode = 0;
    double episode_return = 0.0;  // undiscounted sum of step rewards
    double mean_c_ave = 0.0;      // day-average satisfaction at episode end
    double beta_lin = 0.0;        // penalty coefficients after the episode
    double beta_sqr = 0.0;
    double wall_ms = 0.0;
    std::string extractor;
};

// Pure min-twin bootstrap target.
inline double critic_target_value(double reward, bool done, double gamma, double q1,
                                  double q2) {
    return reward + (done ? 0.0 : gamma * std::min(q1, q2));
}

struct StepHookInfo {
    long step = 0;
    bool warmup = false;
    ActionRaw action;
    const StepOutcome* outcome = nullptr;
};

class Td3Agent {
public:
    Td3Agent(const Scenario& scenario, const AgentConfig& cfg, std::uint64_t seed);

    // Deterministic policy plus exploration noise, clipped to [-1,1]^2.
    ActionRaw select_action(const std::vector<double>& obs_flat, double sigma);
    ActionRaw greedy_action(const std::vector<double>& obs_flat);

    // Min-twin target for one transition, using the target networks and the
    // agent's smoothing-noise stream.
    double critic_target(double reward, bool done, const std::vector<double>& next_obs);

    // One gradient step on a sampled batch; actor and targets move every
    // policy_delay calls. Requires buffer.size() >= batch.
    void train_step();

    // Full training loop: reset -> act -> env step -> store -> train_step.
    std::vector<EpisodeRecord> train(
        const std::function<void(const StepHookInfo&)>& on_step = nullptr);

    const approx::ActorArch& actor_arch() const { return actor_arch_; }
    const approx::Bundle& actor_params() const { return actor_; }
    const AgentConfig& config() const { return cfg_; }
    ReplayBuffer& buffer() { return buffer_; }
    long critic_updates() const { return critic_updates_; }
    long actor_updates() const { return actor_updates_; }

    // Online/target bundles, exposed for tests and checkpointing.
    approx::Bundle& actor() { return actor_; }
    approx::Bundle& critic1() { return critic1_; }
    approx::Bundle& critic2() { return critic2_; }
    approx::Bundle& target_actor() { return target_actor_; }
    approx::Bundle& target_critic1() { return target_critic1_; }
    approx::Bundle& target_critic2() { return target_critic2_; }
    const approx::CriticArch& critic_arch() const { return critic_arch_; }

    void save_checkpoint(const std::string& path,
                         const std::map<std::string, std::string>& extra_meta = {}) const;

private:
    void reduce_and_step(approx::Bundle& bundle, std::vector<std::vector<double>>& slots,
                         int batch, double lr);

    Scenario scenario_;
    AgentConfig cfg_;
    std::uint64_t seed_;

    approx::ExtractorSpec espec_;
    approx::ActorArch actor_arch_;
    approx::CriticArch critic_arch_;
    approx::Bundle actor_, critic1_, critic2_;
    approx::Bundle target_actor_, target_critic1_, target_critic2_;

    ReplayBuffer buffer_;
    Rng rng_explore_, rng_target_noise_, rng_buffer_;
    long critic_updates_ = 0;
    long actor_updates_ = 0;

    // Per-thread workspaces and per-sample gradient slots.
    std::vector<approx::ActorArch::Ws> actor_ws_;
    std::vector<approx::CriticArch::Ws> critic_ws_a_, critic_ws_b_, critic_ws_t_;
    std::vector<std::vector<double>> slot_c1_, slot_c2_, slot_actor_;
    std::vector<double> batch_y_;
    std::vector<std::array<double, 2>> batch_noise_;
};

struct EvalResult {
    double mean_return = 0.0;
    double mean_day_satisfaction = 0.0;
    std::vector<std::vector<StepOutcome>> traces;
};

// Deterministic greedy rollouts; penalty coefficients carry across episodes
// only when the scenario says they persist.
EvalResult evaluate(const approx::ActorArch& arch, const approx::Bundle& params,
                    const Scenario& scenario, int n_episodes);

// Loads the actor stored by save_checkpoint and rebuilds its architecture
// from the archive metadata.
struct LoadedActor {
    approx::ExtractorSpec espec;
    approx::ActorArch arch;
    approx::Bundle params;
};
LoadedActor load_actor(const std::string& path);

}  // namespace drplab::td3
