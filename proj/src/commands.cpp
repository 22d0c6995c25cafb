#include "drplab/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "drplab/scenario_io.hpp"
#include "drplab/synth.hpp"
#include "drplab/util/errors.hpp"
#include "drplab/util/hash.hpp"
#include "json.hpp"

namespace drplab::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const GuardError& e) {
        std::cerr << "guard tripped: " << e.what() << "\n";
        return kExitGuard;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

void run_seeds_maybe_parallel(int jobs, const std::vector<std::uint64_t>& seeds,
                              const std::function<void(std::uint64_t)>& body) {
    if (jobs <= 1) {
        for (auto seed : seeds) body(seed);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            while (true) {
                std::size_t mine;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= seeds.size()) return;
                    mine = next++;
                }
                body(seeds[mine]);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

std::pair<Scenario, std::string> resolve_scenario(const ScenarioSource& src) {
    if (!src.is_synth()) {
        Scenario s = load_scenario(src.path);
        return {std::move(s), git_blob_hash(read_file(src.path))};
    }
    SynthProfile profile = synth_profile_from_string(src.synth_profile);
    Scenario s = synth_scenario(src.synth_seed, profile);
    std::string canonical = scenario_to_yaml(s, synth_start_epoch(profile));
    return {std::move(s), git_blob_hash(canonical)};
}

std::string resolve_out_dir(const std::string& out_flag, const std::string& leaf) {
    if (!out_flag.empty()) return out_flag;
    const char* root = std::getenv("DRLAB_OUT");
    fs::path base = root && *root ? fs::path(root) : fs::path("out");
    return (base / leaf).string();
}

Scenario with_penalty_off(Scenario s) {
    s.penalty.beta_lin0 = 0.0;
    s.penalty.beta_sqr0 = 0.0;
    s.penalty.eta_lin = 0.0;
    s.penalty.eta_sqr = 0.0;
    return s;
}

void write_trace_csv(const std::string& path, const Scenario& s,
                     const std::vector<StepOutcome>& trace, const std::string& tag) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write trace " + path);
    out << "# manifest " << tag << "\n";
    out << "t,dso_price,pv,lambda,p_b,soc";
    for (int i = 0; i < s.n_users(); ++i) out << ",demand_" << i;
    for (int i = 0; i < s.n_users(); ++i) out << ",score_" << i;
    out << ",c_ave,p_dso,p_neg,beta_lin,beta_sqr,penalty,reward\n";
    for (std::size_t t = 0; t < trace.size(); ++t) {
        const StepOutcome& o = trace[t];
        out << t << ',' << fmt17(s.market.dso_price[t]) << ',' << fmt17(s.market.pv[t])
            << ',' << fmt17(o.applied_price) << ',' << fmt17(o.applied_battery) << ','
            << fmt17(o.soc_after);
        for (double d : o.demands) out << ',' << fmt17(d);
        for (int c : o.scores) out << ',' << c;
        out << ',' << fmt17(o.c_ave) << ',' << fmt17(o.p_dso) << ',' << fmt17(o.p_neg)
            << ',' << fmt17(o.beta_lin_after) << ',' << fmt17(o.beta_sqr_after) << ','
            << fmt17(o.penalty) << ',' << fmt17(o.reward) << "\n";
    }
}

void write_metrics_jsonl(const std::string& path,
                         const std::vector<td3::EpisodeRecord>& records,
                         const std::string& tag) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write metrics " + path);
    for (const auto& r : records) {
        ordered_json j;
        j["seed"] = r.seed;
        j["episode"] = r.episode;
        j["return"] = r.episode_return;
        j["mean_c_ave"] = r.mean_c_ave;
        j["beta_lin"] = r.beta_lin;
        j["beta_sqr"] = r.beta_sqr;
        j["wall_ms"] = r.wall_ms;
        j["extractor"] = r.extractor;
        j["manifest"] = tag;
        out << j.dump() << "\n";
    }
}

std::vector<td3::EpisodeRecord> read_metrics_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open metrics " + path);
    std::vector<td3::EpisodeRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line);
        td3::EpisodeRecord r;
        r.seed = j.at("seed");
        r.episode = j.at("episode");
        r.episode_return = j.at("return");
        r.mean_c_ave = j.at("mean_c_ave");
        r.beta_lin = j.at("beta_lin");
        r.beta_sqr = j.at("beta_sqr");
        r.wall_ms = j.at("wall_ms");
        r.extractor = j.at("extractor");
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

struct PreparedRun {
    Scenario scenario;
    Manifest manifest;
    std::string out_dir;
};

PreparedRun prepare(const std::string& command, const ScenarioSource& src,
                    const std::string& out, const td3::AgentConfig& agent,
                    const std::vector<std::uint64_t>& seeds, bool penalty_off) {
    auto [scenario, hash] = resolve_scenario(src);
    if (penalty_off) scenario = with_penalty_off(scenario);
    require_valid(scenario);

    Manifest m;
    m.command = command;
    m.scenario_path = src.path;
    m.synth_profile = src.synth_profile;
    m.synth_seed = src.synth_seed;
    m.seeds = seeds;
    m.out_dir = out;
    m.scenario_hash = hash;
    m.agent = agent;
    m.penalty_off = penalty_off;

    fs::create_directories(out);
    return {std::move(scenario), std::move(m), out};
}

std::vector<std::uint64_t> seed_list(int count) {
    std::vector<std::uint64_t> seeds(count);
    for (int i = 0; i < count; ++i) seeds[i] = static_cast<std::uint64_t>(i);
    return seeds;
}

void train_one_run(const Scenario& scenario, const td3::AgentConfig& agent_cfg,
                   std::uint64_t seed, const std::string& run_dir,
                   const std::string& tag) {
    fs::create_directories(run_dir);
    td3::Td3Agent agent(scenario, agent_cfg, seed);
    auto records = agent.train();
    write_metrics_jsonl(run_dir + "/metrics.jsonl", records, tag);
    agent.save_checkpoint(run_dir + "/checkpoint.bin", {{"manifest", tag}});
    td3::EvalResult ev = td3::evaluate(agent.actor_arch(), agent.actor_params(),
                                       scenario, 1);
    write_trace_csv(run_dir + "/trace_final.csv", scenario, ev.traces[0], tag);
}

}  // namespace

int cmd_train(const TrainArgs& args) {
    return run_guarded([&] {
        std::string out = resolve_out_dir(args.out, "train");
        PreparedRun prep = prepare("train", args.scenario, out, args.agent,
                                   seed_list(args.seeds), args.penalty_off);
        write_manifest(out + "/manifest.json", prep.manifest);
        save_scenario(out + "/scenario.yaml", prep.scenario,
                      args.scenario.is_synth()
                          ? std::optional<std::int64_t>(synth_start_epoch(
                                synth_profile_from_string(args.scenario.synth_profile)))
                          : std::nullopt);
        const std::string tag = prep.manifest.short_tag();

        td3::AgentConfig agent_cfg = args.agent;
        if (args.jobs > 1) agent_cfg.parallel_kernels = false;
        run_seeds_maybe_parallel(args.jobs, prep.manifest.seeds, [&](std::uint64_t seed) {
            train_one_run(prep.scenario, agent_cfg, seed,
                          out + "/run_s" + std::to_string(seed), tag);
        });
        std::cout << "train: " << prep.manifest.seeds.size() << " run(s) under " << out
                  << " (manifest " << tag << ")\n";
    });
}

int cmd_train_from_manifest(const std::string& manifest_path) {
    Manifest m;
    try {
        m = read_manifest(manifest_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    TrainArgs args;
    args.scenario.path = m.scenario_path;
    args.scenario.synth_profile = m.synth_profile;
    args.scenario.synth_seed = m.synth_seed;
    args.out = m.out_dir;
    args.seeds = static_cast<int>(m.seeds.size());
    args.agent = m.agent;
    args.penalty_off = m.penalty_off;
    return cmd_train(args);
}

int cmd_evaluate(const EvaluateArgs& args) {
    return run_guarded([&] {
        if (!fs::exists(args.checkpoint))
            throw ValidationError("checkpoint not found: " + args.checkpoint);
        auto [scenario, hash] = resolve_scenario(args.scenario);
        require_valid(scenario);
        td3::LoadedActor actor = td3::load_actor(args.checkpoint);
        if (actor.espec.obs_len() != scenario.obs_len())
            throw ValidationError("checkpoint observation length " +
                                  std::to_string(actor.espec.obs_len()) +
                                  " does not match scenario " +
                                  std::to_string(scenario.obs_len()));
        td3::EvalResult ev =
            td3::evaluate(actor.arch, actor.params, scenario, args.episodes);
        std::string out = resolve_out_dir(args.out, "evaluate");
        fs::create_directories(out);
        write_trace_csv(out + "/decision_trace.csv", scenario, ev.traces[0],
                        short_hash(hash));
        std::cout << "evaluate: mean_return=" << fmt17(ev.mean_return)
                  << " mean_day_satisfaction=" << fmt17(ev.mean_day_satisfaction)
                  << " episodes=" << args.episodes << "\n";
    });
}

int cmd_certify(const CertifyArgs& args) {
    return run_guarded([&] {
        if (!fs::exists(args.checkpoint))
            throw ValidationError("checkpoint not found: " + args.checkpoint);
        auto [scenario, hash] = resolve_scenario(args.scenario);
        require_valid(scenario);
        td3::LoadedActor actor = td3::load_actor(args.checkpoint);
        oracle::CertifyResult cr =
            oracle::certify(actor.arch, actor.params, scenario, args.grid, args.soc_levels);
        std::string out = resolve_out_dir(args.out, "certify");
        fs::create_directories(out);
        write_trace_csv(out + "/oracle_trace.csv", scenario, cr.oracle.trace,
                        short_hash(hash));
        write_trace_csv(out + "/agent_trace.csv", scenario, cr.agent_trace,
                        short_hash(hash));
        std::cout << "certify: ratio=" << fmt17(cr.ratio)
                  << " agent_return=" << fmt17(cr.agent_return)
                  << " oracle_value=" << fmt17(cr.oracle.best_value) << "\n";
        std::cout << "  t |   agent (lambda, p_b)   |   oracle (lambda, p_b)\n";
        for (std::size_t t = 0; t < cr.oracle.trace.size(); ++t) {
            std::printf(" %2zu |  %9.5f  %9.4f   |  %9.5f  %9.4f\n", t,
                        cr.agent_trace[t].applied_price, cr.agent_trace[t].applied_battery,
                        cr.oracle.trace[t].applied_price,
                        cr.oracle.trace[t].applied_battery);
        }
    });
}

int cmd_sensitivity(const SensitivityArgs& args) {
    return run_guarded([&] {
        if (args.pairs.empty())
            throw ValidationError("sensitivity: at least one eta_lin:eta_sqr pair required");
        std::string out = resolve_out_dir(args.out, "sensitivity");
        PreparedRun prep = prepare("sensitivity", args.scenario, out, args.agent,
                                   seed_list(args.seeds), false);
        prep.manifest.sensitivity_pairs = args.pairs;
        write_manifest(out + "/manifest.json", prep.manifest);
        const std::string tag = prep.manifest.short_tag();

        struct Row {
            double eta_lin, eta_sqr;
            std::uint64_t seed;
            double converged_c_ave, mean_return;
        };
        std::vector<Row> rows;
        std::mutex rows_mu;

        td3::AgentConfig agent_cfg = args.agent;
        if (args.jobs > 1) agent_cfg.parallel_kernels = false;

        for (const auto& [eta_lin, eta_sqr] : args.pairs) {
            Scenario variant = prep.scenario;
            variant.penalty.eta_lin = eta_lin;
            variant.penalty.eta_sqr = eta_sqr;
            run_seeds_maybe_parallel(
                args.jobs, prep.manifest.seeds, [&, el = eta_lin, es = eta_sqr](std::uint64_t seed) {
                    std::ostringstream dir;
                    dir << out << "/sens_" << el << "_" << es << "_s" << seed;
                    fs::create_directories(dir.str());
                    td3::Td3Agent agent(variant, agent_cfg, seed);
                    auto records = agent.train();
                    write_metrics_jsonl(dir.str() + "/metrics.jsonl", records, tag);
                    // converged = mean over the final 10% of episodes
                    std::size_t n = records.size();
                    std::size_t win = std::max<std::size_t>(1, n / 10);
                    double c_ave = 0.0, ret = 0.0;
                    for (std::size_t i = n - win; i < n; ++i) {
                        c_ave += records[i].mean_c_ave;
                        ret += records[i].episode_return;
                    }
                    std::lock_guard<std::mutex> lock(rows_mu);
                    rows.push_back(Row{el, es, seed, c_ave / win, ret / win});
                });
        }

        std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            return std::tie(a.eta_lin, a.eta_sqr, a.seed) <
                   std::tie(b.eta_lin, b.eta_sqr, b.seed);
        });
        std::ofstream summary(out + "/summary.csv");
        if (!summary) throw IoError("cannot write sensitivity summary");
        summary << "# manifest " << tag << "\n";
        summary << "eta_lin,eta_sqr,seed,converged_c_ave,mean_return\n";
        for (const Row& r : rows)
            summary << fmt17(r.eta_lin) << ',' << fmt17(r.eta_sqr) << ',' << r.seed << ','
                    << fmt17(r.converged_c_ave) << ',' << fmt17(r.mean_return) << "\n";
        std::cout << "sensitivity: " << rows.size() << " runs, summary at " << out
                  << "/summary.csv\n";
    });
}

int cmd_export(const ExportArgs& args) {
    return run_guarded([&] {
        Manifest m = read_manifest(args.from + "/manifest.json");
        const std::string tag = m.short_tag();
        std::string out = args.out.empty() ? args.from + "/export" : args.out;
        fs::create_directories(out);

        // Gather per-seed metric logs (train layout).
        std::vector<std::vector<td3::EpisodeRecord>> runs;
        for (auto seed : m.seeds) {
            std::string path = args.from + "/run_s" + std::to_string(seed) + "/metrics.jsonl";
            if (fs::exists(path)) runs.push_back(read_metrics_jsonl(path));
        }
        if (runs.empty() && !fs::exists(args.from + "/summary.csv"))
            throw ValidationError("export: no metrics logs under " + args.from);

        if (!runs.empty()) {
            std::size_t episodes = runs[0].size();
            for (const auto& r : runs) episodes = std::min(episodes, r.size());
            std::ofstream curves(out + "/training_curves.csv");
            curves << "# manifest " << tag << "\n";
            curves << "episode,return_mean,return_lo,return_hi,c_ave_mean,c_ave_lo,"
                      "c_ave_hi,beta_lin_mean,beta_sqr_mean\n";
            for (std::size_t e = 0; e < episodes; ++e) {
                double rm = 0, rlo = 1e300, rhi = -1e300;
                double cm = 0, clo = 1e300, chi = -1e300;
                double bl = 0, bs = 0;
                for (const auto& r : runs) {
                    double ret = r[e].episode_return, c = r[e].mean_c_ave;
                    rm += ret;
                    rlo = std::min(rlo, ret);
                    rhi = std::max(rhi, ret);
                    cm += c;
                    clo = std::min(clo, c);
                    chi = std::max(chi, c);
                    bl += r[e].beta_lin;
                    bs += r[e].beta_sqr;
                }
                double n = static_cast<double>(runs.size());
                curves << e << ',' << fmt17(rm / n) << ',' << fmt17(rlo) << ','
                       << fmt17(rhi) << ',' << fmt17(cm / n) << ',' << fmt17(clo) << ','
                       << fmt17(chi) << ',' << fmt17(bl / n) << ',' << fmt17(bs / n)
                       << "\n";
            }
            // Decision traces share the environment schema; copy them through.
            for (auto seed : m.seeds) {
                std::string src =
                    args.from + "/run_s" + std::to_string(seed) + "/trace_final.csv";
                if (fs::exists(src))
                    fs::copy_file(src, out + "/decision_trace_s" + std::to_string(seed) +
                                           ".csv",
                                  fs::copy_options::overwrite_existing);
            }
        }

        // Sensitivity grid: aggregate summary rows per pair.
        if (fs::exists(args.from + "/summary.csv")) {
            std::ifstream in(args.from + "/summary.csv");
            std::string line;
            std::getline(in, line);  // manifest comment
            std::getline(in, line);  // header
            std::map<std::pair<double, double>, std::vector<std::pair<double, double>>> grid;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                std::istringstream ss(line);
                std::string field;
                std::vector<std::string> fields;
                while (std::getline(ss, field, ',')) fields.push_back(field);
                grid[{std::stod(fields[0]), std::stod(fields[1])}].emplace_back(
                    std::stod(fields[3]), std::stod(fields[4]));
            }
            std::ofstream gout(out + "/sensitivity_grid.csv");
            gout << "# manifest " << tag << "\n";
            gout << "eta_lin,eta_sqr,mean_converged_c_ave,mean_return\n";
            for (const auto& [key, vals] : grid) {
                double c = 0, r = 0;
                for (const auto& [cv, rv] : vals) {
                    c += cv;
                    r += rv;
                }
                gout << fmt17(key.first) << ',' << fmt17(key.second) << ','
                     << fmt17(c / vals.size()) << ',' << fmt17(r / vals.size()) << "\n";
            }
        }
        std::cout << "export: tables written to " << out << "\n";
    });
}

int cmd_synth(const SynthArgs& args) {
    return run_guarded([&] {
        SynthProfile profile = synth_profile_from_string(args.profile);
        Scenario s = synth_scenario(args.seed, profile);
        require_valid(s);
        std::string out = resolve_out_dir(args.out, "synth");
        fs::create_directories(out);
        std::string path = out + "/scenario_" + args.profile + "_" +
                           std::to_string(args.seed) + ".yaml";
        save_scenario(path, s, synth_start_epoch(profile));
        std::cout << "synth: wrote " << path << "\n";
    });
}

}  // namespace drplab::cli
