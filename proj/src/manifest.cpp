#include "drplab/cli/manifest.hpp"

#include <fstream>
#include <sstream>

#include "drplab/util/errors.hpp"
#include "drplab/util/hash.hpp"
#include "json.hpp"

namespace drplab::cli {

using nlohmann::ordered_json;

namespace {

ordered_json agent_to_json(const td3::AgentConfig& a) {
    ordered_json j;
    j["gamma"] = a.gamma;
    j["lr_actor"] = a.lr_actor;
    j["lr_critic"] = a.lr_critic;
    j["batch"] = a.batch;
    j["buffer_capacity"] = a.buffer_capacity;
    j["policy_delay"] = a.policy_delay;
    j["tau"] = a.tau;
    j["exploration_noise_sigma"] = a.exploration_noise_sigma;
    j["target_noise_sigma"] = a.target_noise_sigma;
    j["target_noise_clip"] = a.target_noise_clip;
    j["warmup_steps"] = a.warmup_steps;
    j["total_steps"] = a.total_steps;
    j["extractor"] = approx::to_string(a.extractor);
    j["lstm_hidden"] = a.lstm_hidden;
    j["fused_dim"] = a.fused_dim;
    j["scalar_hidden"] = a.scalar_hidden;
    return j;
}

td3::AgentConfig agent_from_json(const ordered_json& j) {
    td3::AgentConfig a;
    a.gamma = j.at("gamma");
    a.lr_actor = j.at("lr_actor");
    a.lr_critic = j.at("lr_critic");
    a.batch = j.at("batch");
    a.buffer_capacity = j.at("buffer_capacity");
    a.policy_delay = j.at("policy_delay");
    a.tau = j.at("tau");
    a.exploration_noise_sigma = j.at("exploration_noise_sigma");
    a.target_noise_sigma = j.at("target_noise_sigma");
    a.target_noise_clip = j.at("target_noise_clip");
    a.warmup_steps = j.at("warmup_steps");
    a.total_steps = j.at("total_steps");
    a.extractor = approx::extractor_kind_from_string(j.at("extractor"));
    a.lstm_hidden = j.at("lstm_hidden");
    a.fused_dim = j.at("fused_dim");
    a.scalar_hidden = j.at("scalar_hidden");
    return a;
}

}  // namespace

std::string Manifest::to_json() const {
    ordered_json j;
    j["command"] = command;
    if (!scenario_path.empty()) {
        j["scenario"] = {{"path", scenario_path}};
    } else {
        j["scenario"] = {{"synth", synth_profile}, {"synth_seed", synth_seed}};
    }
    j["scenario_hash"] = scenario_hash;
    j["seeds"] = seeds;
    j["out"] = out_dir;
    j["agent"] = agent_to_json(agent);
    j["penalty_off"] = penalty_off;
    if (!sensitivity_pairs.empty()) {
        ordered_json pairs = ordered_json::array();
        for (const auto& [el, es] : sensitivity_pairs)
            pairs.push_back({{"eta_lin", el}, {"eta_sqr", es}});
        j["sensitivity_pairs"] = pairs;
    }
    return j.dump(2) + "\n";
}

Manifest Manifest::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    Manifest m;
    m.command = j.at("command");
    const auto& sc = j.at("scenario");
    if (sc.contains("path")) {
        m.scenario_path = sc.at("path");
    } else {
        m.synth_profile = sc.at("synth");
        m.synth_seed = sc.at("synth_seed");
    }
    m.scenario_hash = j.at("scenario_hash");
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.out_dir = j.at("out");
    m.agent = agent_from_json(j.at("agent"));
    m.penalty_off = j.value("penalty_off", false);
    if (j.contains("sensitivity_pairs")) {
        for (const auto& p : j.at("sensitivity_pairs"))
            m.sensitivity_pairs.emplace_back(p.at("eta_lin"), p.at("eta_sqr"));
    }
    return m;
}

std::string Manifest::short_tag() const { return short_hash(git_blob_hash(to_json())); }

void write_manifest(const std::string& path, const Manifest& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path);
    out << m.to_json();
}

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return Manifest::from_json(ss.str());
}

}  // namespace drplab::cli
