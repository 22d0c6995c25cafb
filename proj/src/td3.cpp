#include "drplab/td3/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "drplab/util/errors.hpp"
#include "drplab/util/parallel.hpp"

namespace drplab::td3 {

using approx::Bundle;

namespace {

double clip(double x, double lo, double hi) { return x < lo ? lo : (x > hi ? hi : x); }

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

Td3Agent::Td3Agent(const Scenario& scenario, const AgentConfig& cfg, std::uint64_t seed)
    : scenario_(scenario),
      cfg_(cfg),
      seed_(seed),
      buffer_(cfg.buffer_capacity),
      rng_explore_(substream_seed(seed, streams::kExploration)),
      rng_target_noise_(substream_seed(seed, streams::kTargetNoise)),
      rng_buffer_(substream_seed(seed, streams::kBuffer)) {
    require_valid(scenario_);
    espec_ = approx::make_extractor_spec(scenario_, cfg.extractor, cfg.lstm_hidden,
                                         cfg.fused_dim, cfg.scalar_hidden);

    actor_arch_ = approx::ActorArch::build(espec_, actor_);
    critic_arch_ = approx::CriticArch::build(espec_, critic1_);
    // Same architecture, fresh parameter storage for the second critic.
    Bundle scratch;
    (void)approx::CriticArch::build(espec_, scratch);
    critic2_ = scratch;

    Rng init_rng(substream_seed(seed, streams::kInit));
    actor_arch_.init(actor_, init_rng);
    critic_arch_.init(critic1_, init_rng);
    critic_arch_.init(critic2_, init_rng);
    target_actor_ = actor_;
    target_critic1_ = critic1_;
    target_critic2_ = critic2_;

    int n_threads = max_threads();
    for (int i = 0; i < n_threads; ++i) {
        actor_ws_.push_back(actor_arch_.make_ws());
        critic_ws_a_.push_back(critic_arch_.make_ws());
        critic_ws_b_.push_back(critic_arch_.make_ws());
        critic_ws_t_.push_back(critic_arch_.make_ws());
    }
    slot_c1_.resize(cfg.batch);
    slot_c2_.resize(cfg.batch);
    slot_actor_.resize(cfg.batch);
    batch_y_.resize(cfg.batch);
    batch_noise_.resize(cfg.batch);
}

ActionRaw Td3Agent::greedy_action(const std::vector<double>& obs_flat) {
    std::array<double, 2> a{};
    actor_arch_.forward(actor_.value.data(), obs_flat.data(), actor_ws_[0], a);
    return {a[0], a[1]};
}

ActionRaw Td3Agent::select_action(const std::vector<double>& obs_flat, double sigma) {
    ActionRaw a = greedy_action(obs_flat);
    if (sigma > 0.0) {
        a.a1 = clip(a.a1 + rng_explore_.normal(0.0, sigma), -1.0, 1.0);
        a.a2 = clip(a.a2 + rng_explore_.normal(0.0, sigma), -1.0, 1.0);
    }
    return a;
}

double Td3Agent::critic_target(double reward, bool done,
                               const std::vector<double>& next_obs) {
    double n1 = clip(rng_target_noise_.normal(0.0, cfg_.target_noise_sigma),
                     -cfg_.target_noise_clip, cfg_.target_noise_clip);
    double n2 = clip(rng_target_noise_.normal(0.0, cfg_.target_noise_sigma),
                     -cfg_.target_noise_clip, cfg_.target_noise_clip);
    std::array<double, 2> a{};
    actor_arch_.forward(target_actor_.value.data(), next_obs.data(), actor_ws_[0], a);
    a[0] = clip(a[0] + n1, -1.0, 1.0);
    a[1] = clip(a[1] + n2, -1.0, 1.0);
    double q1 = critic_arch_.forward(target_critic1_.value.data(), next_obs.data(), a,
                                     critic_ws_a_[0]);
    double q2 = critic_arch_.forward(target_critic2_.value.data(), next_obs.data(), a,
                                     critic_ws_b_[0]);
    return critic_target_value(reward, done, cfg_.gamma, q1, q2);
}

void Td3Agent::reduce_and_step(Bundle& bundle, std::vector<std::vector<double>>& slots,
                               int batch, double lr) {
    bundle.zero_grad();
    const std::size_t n = bundle.size();
    for (int j = 0; j < batch; ++j) {
        const std::vector<double>& g = slots[j];
        for (std::size_t i = 0; i < n; ++i) bundle.grad[i] += g[i];
    }
    approx::AdamConfig adam;
    adam.lr = lr;
    approx::adam_step(bundle, adam);
}

void Td3Agent::train_step() {
    const int batch = cfg_.batch;
    if (buffer_.size() < static_cast<std::size_t>(batch))
        throw GuardError("train_step: buffer smaller than batch");

    auto indices = buffer_.sample_indices(batch, rng_buffer_);
    for (int j = 0; j < batch; ++j) {
        batch_noise_[j][0] = clip(rng_target_noise_.normal(0.0, cfg_.target_noise_sigma),
                                  -cfg_.target_noise_clip, cfg_.target_noise_clip);
        batch_noise_[j][1] = clip(rng_target_noise_.normal(0.0, cfg_.target_noise_sigma),
                                  -cfg_.target_noise_clip, cfg_.target_noise_clip);
    }

    const std::size_t n_critic = critic1_.size();
    const double* theta_ta = target_actor_.value.data();
    const double* theta_tc1 = target_critic1_.value.data();
    const double* theta_tc2 = target_critic2_.value.data();
    const double* theta_c1 = critic1_.value.data();
    const double* theta_c2 = critic2_.value.data();

    parallel_for(batch, cfg_.parallel_kernels, [&](int j) {
#ifdef _OPENMP
        int tid = omp_get_thread_num();
#else
        int tid = 0;
#endif
        const Transition& tr = buffer_.at(indices[j]);

        std::array<double, 2> a_next{};
        actor_arch_.forward(theta_ta, tr.next_obs.data(), actor_ws_[tid], a_next);
        a_next[0] = clip(a_next[0] + batch_noise_[j][0], -1.0, 1.0);
        a_next[1] = clip(a_next[1] + batch_noise_[j][1], -1.0, 1.0);
        double q1t = critic_arch_.forward(theta_tc1, tr.next_obs.data(), a_next,
                                          critic_ws_t_[tid]);
        double q2t = critic_arch_.forward(theta_tc2, tr.next_obs.data(), a_next,
                                          critic_ws_t_[tid]);
        double y = critic_target_value(tr.reward, tr.done, cfg_.gamma, q1t, q2t);
        batch_y_[j] = y;

        if (slot_c1_[j].size() != n_critic) slot_c1_[j].assign(n_critic, 0.0);
        else std::fill(slot_c1_[j].begin(), slot_c1_[j].end(), 0.0);
        if (slot_c2_[j].size() != n_critic) slot_c2_[j].assign(n_critic, 0.0);
        else std::fill(slot_c2_[j].begin(), slot_c2_[j].end(), 0.0);

        double q1 = critic_arch_.forward(theta_c1, tr.obs.data(), tr.action,
                                         critic_ws_a_[tid]);
        critic_arch_.backward_params(theta_c1, critic_ws_a_[tid],
                                     2.0 * (q1 - y) / batch, slot_c1_[j].data());
        double q2 = critic_arch_.forward(theta_c2, tr.obs.data(), tr.action,
                                         critic_ws_b_[tid]);
        critic_arch_.backward_params(theta_c2, critic_ws_b_[tid],
                                     2.0 * (q2 - y) / batch, slot_c2_[j].data());
    });

    reduce_and_step(critic1_, slot_c1_, batch, cfg_.lr_critic);
    reduce_and_step(critic2_, slot_c2_, batch, cfg_.lr_critic);
    critic_updates_ += 1;

    if (critic_updates_ % cfg_.policy_delay == 0) {
        const std::size_t n_actor = actor_.size();
        const double* theta_a = actor_.value.data();
        const double* theta_q1 = critic1_.value.data();
        parallel_for(batch, cfg_.parallel_kernels, [&](int j) {
#ifdef _OPENMP
            int tid = omp_get_thread_num();
#else
            int tid = 0;
#endif
            const Transition& tr = buffer_.at(indices[j]);
            if (slot_actor_[j].size() != n_actor) slot_actor_[j].assign(n_actor, 0.0);
            else std::fill(slot_actor_[j].begin(), slot_actor_[j].end(), 0.0);

            std::array<double, 2> a_pi{};
            actor_arch_.forward(theta_a, tr.obs.data(), actor_ws_[tid], a_pi);
            critic_arch_.forward(theta_q1, tr.obs.data(), a_pi, critic_ws_a_[tid]);
            std::array<double, 2> dq_da{};
            critic_arch_.backward_action(theta_q1, critic_ws_a_[tid], 1.0, dq_da);
            // ascend Q1: loss = -mean(Q1), so push -dq/batch through the actor
            std::array<double, 2> da{-dq_da[0] / batch, -dq_da[1] / batch};
            actor_arch_.backward(theta_a, actor_ws_[tid], da, slot_actor_[j].data());
        });
        reduce_and_step(actor_, slot_actor_, batch, cfg_.lr_actor);
        actor_updates_ += 1;

        approx::soft_update(target_actor_, actor_, cfg_.tau);
        approx::soft_update(target_critic1_, critic1_, cfg_.tau);
        approx::soft_update(target_critic2_, critic2_, cfg_.tau);
    }
}

std::vector<EpisodeRecord> Td3Agent::train(
    const std::function<void(const StepHookInfo&)>& on_step) {
    MarketEnv env(scenario_);
    std::vector<double> obs = env.reset(substream_seed(seed_, streams::kEnv)).flatten();

    std::vector<EpisodeRecord> records;
    int episode = 0;
    double ep_return = 0.0;
    auto ep_start = std::chrono::steady_clock::now();

    for (long step = 0; step < cfg_.total_steps; ++step) {
        ActionRaw a{};
        bool warmup = step < cfg_.warmup_steps;
        if (warmup) {
            a.a1 = rng_explore_.uniform(-1.0, 1.0);
            a.a2 = rng_explore_.uniform(-1.0, 1.0);
        } else {
            a = select_action(obs, cfg_.exploration_noise_sigma);
        }

        StepOutcome out = env.step(a);
        std::vector<double> next_obs = env.observation().flatten();

        Transition tr;
        tr.obs = obs;
        tr.action = {a.a1, a.a2};
        tr.reward = out.reward;
        tr.next_obs = next_obs;
        tr.done = out.done;
        buffer_.store(std::move(tr));
        ep_return += out.reward;

        if (on_step) {
            StepHookInfo info;
            info.step = step;
            info.warmup = warmup;
            info.action = a;
            info.outcome = &out;
            on_step(info);
        }

        if (step >= cfg_.warmup_steps &&
            buffer_.size() >= static_cast<std::size_t>(cfg_.batch)) {
            train_step();
        }

        if (out.done) {
            auto now = std::chrono::steady_clock::now();
            EpisodeRecord rec;
            rec.seed = seed_;
            rec.episode = episode;
            rec.episode_return = ep_return;
            rec.mean_c_ave = out.c_ave;
            rec.beta_lin = env.state().penalty_state.beta_lin;
            rec.beta_sqr = env.state().penalty_state.beta_sqr;
            rec.wall_ms =
                std::chrono::duration<double, std::milli>(now - ep_start).count();
            rec.extractor = approx::to_string(cfg_.extractor);
            records.push_back(rec);

            episode += 1;
            ep_return = 0.0;
            ep_start = now;
            obs = env.reset(substream_seed(seed_, streams::kEnv)).flatten();
        } else {
            obs = std::move(next_obs);
        }
    }
    return records;
}

void Td3Agent::save_checkpoint(const std::string& path,
                               const std::map<std::string, std::string>& extra_meta) const {
    approx::Archive ar;
    ar.meta["format"] = "drplab-checkpoint";
    ar.meta["extractor"] = approx::to_string(espec_.kind);
    ar.meta["seq_len"] = std::to_string(espec_.seq_len);
    ar.meta["lstm_hidden"] = std::to_string(espec_.pv_branch.hidden_dim);
    ar.meta["scalar_hidden"] = std::to_string(espec_.scalar_branch.out_dim);
    ar.meta["fused_dim"] = std::to_string(espec_.fused_dim);
    ar.meta["pv_scale"] = fmt17(espec_.scales.pv);
    ar.meta["price_scale"] = fmt17(espec_.scales.price);
    for (const auto& [k, v] : extra_meta) ar.meta[k] = v;
    ar.put_bundle("actor", actor_);
    ar.put_bundle("critic1", critic1_);
    ar.put_bundle("critic2", critic2_);
    ar.put_bundle("target_actor", target_actor_);
    ar.put_bundle("target_critic1", target_critic1_);
    ar.put_bundle("target_critic2", target_critic2_);
    approx::save_archive(path, ar);
}

LoadedActor load_actor(const std::string& path) {
    approx::Archive ar = approx::load_archive(path);
    auto need = [&ar, &path](const std::string& key) -> std::string {
        auto it = ar.meta.find(key);
        if (it == ar.meta.end()) throw IoError(path + ": checkpoint missing meta " + key);
        return it->second;
    };
    LoadedActor la;
    la.espec.kind = approx::extractor_kind_from_string(need("extractor"));
    la.espec.seq_len = std::stoi(need("seq_len"));
    int hidden = std::stoi(need("lstm_hidden"));
    la.espec.pv_branch = {1, hidden, la.espec.seq_len};
    la.espec.dso_branch = {1, hidden, la.espec.seq_len};
    la.espec.scalar_branch = {8, std::stoi(need("scalar_hidden")), approx::Act::Tanh};
    la.espec.fused_dim = std::stoi(need("fused_dim"));
    la.espec.mlp_hidden = la.espec.fused_dim;
    la.espec.scales.pv = std::stod(need("pv_scale"));
    la.espec.scales.price = std::stod(need("price_scale"));
    la.arch = approx::ActorArch::build(la.espec, la.params);
    ar.get_bundle("actor", la.params);
    return la;
}

EvalResult evaluate(const approx::ActorArch& arch, const approx::Bundle& params,
                    const Scenario& scenario, int n_episodes) {
    MarketEnv env(scenario);
    approx::ActorArch::Ws ws = arch.make_ws();
    EvalResult res;
    for (int ep = 0; ep < n_episodes; ++ep) {
        std::vector<double> obs = env.reset(0).flatten();
        std::vector<StepOutcome> trace;
        double ret = 0.0;
        double final_c_ave = 0.0;
        while (!env.done()) {
            std::array<double, 2> a{};
            arch.forward(params.value.data(), obs.data(), ws, a);
            StepOutcome out = env.step(ActionRaw{a[0], a[1]});
            ret += out.reward;
            final_c_ave = out.c_ave;
            trace.push_back(std::move(out));
            obs = env.observation().flatten();
        }
        res.mean_return += ret;
        res.mean_day_satisfaction += final_c_ave;
        res.traces.push_back(std::move(trace));
    }
    res.mean_return /= n_episodes;
    res.mean_day_satisfaction /= n_episodes;
    return res;
}

}  // namespace drplab::td3
