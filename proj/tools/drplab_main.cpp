// drplab: demand-response pricing laboratory.
// Subcommands: train, evaluate, certify, sensitivity, export, synth.

#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drplab/cli/commands.hpp"
#include "drplab/util/errors.hpp"

using namespace drplab;

namespace {

void add_scenario_flags(CLI::App* cmd, cli::ScenarioSource& src) {
    cmd->add_option("--scenario", src.path, "scenario YAML file");
    cmd->add_option("--synth", src.synth_profile, "synthetic profile (winter|summer)");
    cmd->add_option("--synth-seed", src.synth_seed, "synthetic generator seed");
}

void add_agent_flags(CLI::App* cmd, td3::AgentConfig& agent, std::string& extractor) {
    cmd->add_option("--steps", agent.total_steps, "total environment steps per run");
    cmd->add_option("--warmup", agent.warmup_steps, "uniform-action warmup steps");
    cmd->add_option("--batch", agent.batch, "training batch size");
    cmd->add_option("--lr-actor", agent.lr_actor, "actor learning rate");
    cmd->add_option("--lr-critic", agent.lr_critic, "critic learning rate");
    cmd->add_option("--gamma", agent.gamma, "discount factor");
    cmd->add_option("--tau", agent.tau, "target soft-update rate");
    cmd->add_option("--policy-delay", agent.policy_delay, "critic updates per actor update");
    cmd->add_option("--expl-sigma", agent.exploration_noise_sigma, "exploration noise sigma");
    cmd->add_option("--extractor", extractor, "feature extractor (mbtf|mlp)");
    cmd->add_option("--lstm-hidden", agent.lstm_hidden, "recurrent branch hidden size");
    cmd->add_option("--fused-dim", agent.fused_dim, "fused feature dimension");
}

int parse_pairs(const std::string& text, std::vector<std::pair<double, double>>& out) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        std::size_t colon = item.find(':');
        if (colon == std::string::npos) return 1;
        out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out.empty() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drplab: demand-response dynamic-pricing laboratory"};
    app.require_subcommand(1);

    cli::TrainArgs train;
    std::string train_extractor = "mbtf";
    std::string train_manifest;
    auto* t = app.add_subcommand("train", "train agents over one or more seeds");
    add_scenario_flags(t, train.scenario);
    add_agent_flags(t, train.agent, train_extractor);
    t->add_option("--seeds", train.seeds, "number of seeds (0..K-1)");
    t->add_option("--jobs", train.jobs, "parallel training workers");
    t->add_option("--out", train.out, "output directory");
    t->add_flag("--penalty-off", train.penalty_off, "zero all penalty coefficients");
    t->add_option("--from-manifest", train_manifest, "rerun a previous manifest");

    cli::EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "greedy rollouts from a checkpoint");
    add_scenario_flags(e, ev.scenario);
    e->add_option("--checkpoint", ev.checkpoint, "checkpoint file")->required();
    e->add_option("--episodes", ev.episodes, "evaluation episodes");
    e->add_option("--out", ev.out, "output directory");

    cli::CertifyArgs ce;
    auto* c = app.add_subcommand("certify", "compare a checkpoint against the oracle");
    add_scenario_flags(c, ce.scenario);
    c->add_option("--checkpoint", ce.checkpoint, "checkpoint file")->required();
    c->add_option("--grid-price", ce.grid.n_price, "price grid points");
    c->add_option("--grid-batt", ce.grid.n_batt, "battery grid points");
    c->add_option("--max-horizon", ce.grid.max_horizon, "largest accepted horizon");
    c->add_option("--soc-levels", ce.soc_levels, "soc buckets for the dynamic program");
    c->add_option("--out", ce.out, "output directory");

    cli::SensitivityArgs se;
    std::string sens_pairs;
    std::string sens_extractor = "mbtf";
    auto* sn = app.add_subcommand("sensitivity", "penalty-step sweep (eta_lin, eta_sqr)");
    add_scenario_flags(sn, se.scenario);
    add_agent_flags(sn, se.agent, sens_extractor);
    sn->add_option("--pairs", sens_pairs, "pairs as eta_lin:eta_sqr[,...]")->required();
    sn->add_option("--seeds", se.seeds, "number of seeds");
    sn->add_option("--jobs", se.jobs, "parallel workers");
    sn->add_option("--out", se.out, "output directory");

    cli::ExportArgs ex;
    auto* x = app.add_subcommand("export", "aggregate logs into plot-ready tables");
    x->add_option("--from", ex.from, "train/sensitivity output directory")->required();
    x->add_option("--out", ex.out, "export directory (default <from>/export)");

    cli::SynthArgs sy;
    auto* s = app.add_subcommand("synth", "write a synthetic scenario file");
    s->add_option("--synth", sy.profile, "profile (winter|summer)")->required();
    s->add_option("--synth-seed", sy.seed, "generator seed");
    s->add_option("--out", sy.out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (t->parsed()) {
            if (!train_manifest.empty()) return cli::cmd_train_from_manifest(train_manifest);
            train.agent.extractor = approx::extractor_kind_from_string(train_extractor);
            return cli::cmd_train(train);
        }
        if (e->parsed()) return cli::cmd_evaluate(ev);
        if (c->parsed()) return cli::cmd_certify(ce);
        if (sn->parsed()) {
            se.agent.extractor = approx::extractor_kind_from_string(sens_extractor);
            if (parse_pairs(sens_pairs, se.pairs) != 0) {
                std::fprintf(stderr, "validation error: --pairs must be el:es[,el:es...]\n");
                return cli::kExitValidation;
            }
            return cli::cmd_sensitivity(se);
        }
        if (x->parsed()) return cli::cmd_export(ex);
        if (s->parsed()) return cli::cmd_synth(sy);
    } catch (const ValidationError& err) {
        std::fprintf(stderr, "validation error: %s\n", err.what());
        return cli::kExitValidation;
    } catch (const GuardError& err) {
        std::fprintf(stderr, "guard tripped: %s\n", err.what());
        return cli::kExitGuard;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
    return 0;
}
