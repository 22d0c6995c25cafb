#include "drplab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "drplab/td3/agent.hpp"
#include "drplab/user_model.hpp"
#include "drplab/util/errors.hpp"
#include "drplab/util/parallel.hpp"

namespace drplab::oracle {

namespace {

using Actions = std::vector<std::pair<double, double>>;

std::uint64_t bits_of(double x) {
    std::uint64_t b;
    std::memcpy(&b, &x, sizeof(b));
    return b;
}

double double_of(std::uint64_t b) {
    double x;
    std::memcpy(&x, &b, sizeof(x));
    return x;
}

struct Best {
    double value = -std::numeric_limits<double>::infinity();
    Actions actions;

    void consider(double v, const Actions& a) {
        if (v > value || (v == value && a < actions)) {
            value = v;
            actions = a;
        }
    }
    void merge(const Best& other) {
        if (other.actions.empty() && std::isinf(other.value)) return;
        consider(other.value, other.actions);
    }
};

void check_exhaustive_guard(const Scenario& s, const GridSpec& grid) {
    if (s.horizon > grid.max_horizon)
        throw GuardError("exhaustive_optimal: horizon " + std::to_string(s.horizon) +
                         " exceeds grid.max_horizon " + std::to_string(grid.max_horizon));
    double count = std::pow(static_cast<double>(grid.n_price) * grid.n_batt, s.horizon);
    if (count > 1e7)
        throw GuardError("exhaustive_optimal: action tree of ~" + std::to_string(count) +
                         " sequences exceeds the 1e7 guard");
}

void dfs(const Scenario& s, const GridSpec& grid, const EnvState& st, double acc,
         Actions& seq, Best& best) {
    if (st.t >= s.horizon) {
        best.consider(acc, seq);
        return;
    }
    std::optional<double> prior =
        st.t == 0 ? std::nullopt : std::optional<double>(st.lambda_prev);
    auto prices = price_candidates(s, st.t, prior, grid.n_price);
    auto powers = battery_candidates(s.battery, st.soc, grid.n_batt);
    for (double lam : prices) {
        for (double pb : powers) {
            StepResult r = step_applied(s, st, lam, pb, /*build_obs=*/false);
            seq.emplace_back(r.outcome.applied_price, r.outcome.applied_battery);
            dfs(s, grid, r.next_state, acc + r.outcome.reward, seq, best);
            seq.pop_back();
        }
    }
}

// Replays an applied action sequence through the true environment; fills the
// trace and returns the accumulated reward (same summation order as search).
double replay(const Scenario& s, const Actions& actions, std::vector<StepOutcome>& trace) {
    auto [st, obs] = reset(s, 0);
    (void)obs;
    // The oracle always scores one fresh episode: coefficients start at their
    // initial values regardless of the persistence flag.
    st.penalty_state = PenaltyState::initial(s.penalty);
    double acc = 0.0;
    trace.clear();
    for (const auto& [lam, pb] : actions) {
        StepResult r = step_applied(s, st, lam, pb, /*build_obs=*/false);
        acc += r.outcome.reward;
        trace.push_back(r.outcome);
        st = std::move(r.next_state);
    }
    return acc;
}

}  // namespace

std::vector<double> price_candidates(const Scenario& s, int t,
                                     std::optional<double> lambda_prev, int n_price) {
    double dso = s.market.dso_price[t];
    double lo = s.pricing.k1 * dso;
    double hi = s.pricing.k2 * dso;
    PriceInterval feasible = feasible_price_interval(s.pricing, dso, lambda_prev);
    std::vector<double> out;
    out.reserve(n_price);
    for (int i = 0; i < n_price; ++i) {
        double g = n_price == 1 ? lo
                                : lo + (hi - lo) * static_cast<double>(i) /
                                           static_cast<double>(n_price - 1);
        double applied = feasible.clip(g);
        if (out.empty() || applied != out.back()) out.push_back(applied);
    }
    return out;
}

std::vector<double> battery_candidates(const BatterySpec& b, double soc, int n_batt) {
    double max_dis = max_discharge_power(b, soc);
    double max_ch = max_charge_power(b, soc);
    std::vector<double> out;
    out.reserve(n_batt);
    for (int i = 0; i < n_batt; ++i) {
        double g = n_batt == 1 ? b.p_min
                               : b.p_min + (b.p_max - b.p_min) * static_cast<double>(i) /
                                               static_cast<double>(n_batt - 1);
        double applied = std::clamp(g, max_dis, max_ch);
        if (out.empty() || applied != out.back()) out.push_back(applied);
    }
    return out;
}

OracleResult exhaustive_optimal(const Scenario& s, const GridSpec& grid, bool parallel) {
    require_valid(s);
    check_exhaustive_guard(s, grid);

    auto [root, obs] = reset(s, 0);
    (void)obs;
    root.penalty_state = PenaltyState::initial(s.penalty);

    Best best;
    if (!parallel || s.horizon == 0) {
        Actions seq;
        dfs(s, grid, root, 0.0, seq, best);
    } else {
        // Root split: first-period actions fan out across threads, each
        // subtree walks serially, partial bests merge in root order.
        auto prices = price_candidates(s, 0, std::nullopt, grid.n_price);
        auto powers = battery_candidates(s.battery, root.soc, grid.n_batt);
        std::vector<std::pair<double, double>> roots;
        for (double lam : prices)
            for (double pb : powers) roots.emplace_back(lam, pb);
        std::vector<Best> partial(roots.size());
        parallel_for(static_cast<int>(roots.size()), true, [&](int i) {
            StepResult r = step_applied(s, root, roots[i].first, roots[i].second, false);
            Actions seq{{r.outcome.applied_price, r.outcome.applied_battery}};
            dfs(s, grid, r.next_state, r.outcome.reward, seq, partial[i]);
        });
        for (const Best& p : partial) best.merge(p);
    }

    OracleResult res;
    res.best_actions = best.actions;
    res.best_value = replay(s, best.actions, res.trace);
    res.discretized_value = res.best_value;
    return res;
}

namespace {

struct DpKey {
    int t = 0;
    int soc_idx = 0;
    long sat_sum = 0;
    std::uint64_t lam_bits = 0;
    std::uint64_t bl_bits = 0;
    std::uint64_t bs_bits = 0;

    bool operator==(const DpKey& o) const {
        return t == o.t && soc_idx == o.soc_idx && sat_sum == o.sat_sum &&
               lam_bits == o.lam_bits && bl_bits == o.bl_bits && bs_bits == o.bs_bits;
    }
};

struct DpKeyHash {
    std::size_t operator()(const DpKey& k) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v) {
            h ^= v;
            h *= 0x100000001b3ULL;
        };
        mix(static_cast<std::uint64_t>(k.t));
        mix(static_cast<std::uint64_t>(k.soc_idx));
        mix(static_cast<std::uint64_t>(k.sat_sum));
        mix(k.lam_bits);
        mix(k.bl_bits);
        mix(k.bs_bits);
        return static_cast<std::size_t>(h);
    }
};

struct DpNode {
    double value = -std::numeric_limits<double>::infinity();
    DpKey parent;
    double act_lambda = 0.0;
    double act_p = 0.0;
};

using Stage = std::unordered_map<DpKey, DpNode, DpKeyHash>;

Actions reconstruct(const std::vector<Stage>& stages, DpKey key) {
    Actions seq;
    for (int t = key.t; t > 0; --t) {
        const DpNode& node = stages[t].at(key);
        seq.emplace_back(node.act_lambda, node.act_p);
        key = node.parent;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
}

}  // namespace

OracleResult dp_optimal(const Scenario& s, const GridSpec& grid, int soc_levels,
                        int sat_levels) {
    require_valid(s);
    if (s.horizon > 24)
        throw GuardError("dp_optimal: horizon beyond 24 is out of scope");
    if (soc_levels < 2) throw GuardError("dp_optimal: soc_levels must be >= 2");
    long sat_needed = 10L * s.n_users() * s.horizon + 1;
    if (sat_levels < sat_needed)
        throw GuardError("dp_optimal: sat_levels " + std::to_string(sat_levels) +
                         " below the exact score-sum range " + std::to_string(sat_needed));

    const BatterySpec& b = s.battery;
    auto soc_of = [&b, soc_levels](int idx) {
        return b.soc_min + (b.soc_max - b.soc_min) * static_cast<double>(idx) /
                               static_cast<double>(soc_levels - 1);
    };
    auto nearest_bucket = [&b, soc_levels](double soc) {
        double x = (soc - b.soc_min) / (b.soc_max - b.soc_min);
        int idx = static_cast<int>(std::lround(x * (soc_levels - 1)));
        return std::clamp(idx, 0, soc_levels - 1);
    };
    // Coefficients are constant when both steps are zero; drop them from the
    // key so equal-sum paths merge.
    const bool beta_static = s.penalty.eta_lin == 0.0 && s.penalty.eta_sqr == 0.0;

    std::vector<Stage> stages(s.horizon + 1);
    PenaltyState beta0 = PenaltyState::initial(s.penalty);
    DpKey root;
    root.t = 0;
    root.soc_idx = nearest_bucket(b.soc0);
    root.sat_sum = 0;
    root.lam_bits = 0;
    root.bl_bits = beta_static ? 0 : bits_of(beta0.beta_lin);
    root.bs_bits = beta_static ? 0 : bits_of(beta0.beta_sqr);
    stages[0][root] = DpNode{0.0, root, 0.0, 0.0};

    const long state_guard = 5'000'000;
    long total_states = 1;

    for (int t = 0; t < s.horizon; ++t) {
        Stage& cur = stages[t];
        Stage& next = stages[t + 1];
        for (const auto& [key, node] : cur) {
            EnvState st;
            st.t = t;
            st.soc = soc_of(key.soc_idx);
            st.sat_sum = key.sat_sum;
            st.penalty_state = beta_static
                                   ? beta0
                                   : PenaltyState{double_of(key.bl_bits),
                                                  double_of(key.bs_bits), s.penalty};
            std::optional<double> prior;
            if (t > 0) {
                st.lambda_prev = double_of(key.lam_bits);
                prior = st.lambda_prev;
                st.d_prev.resize(s.users.size());
                for (std::size_t i = 0; i < s.users.size(); ++i)
                    st.d_prev[i] = optimal_demand(s.users[i], st.lambda_prev, t - 1);
            } else {
                st.lambda_prev = s.market.dso_price[0];
                st.d_prev.resize(s.users.size());
                for (std::size_t i = 0; i < s.users.size(); ++i)
                    st.d_prev[i] = s.users[i].d_ideal[0];
            }

            auto prices = price_candidates(s, t, prior, grid.n_price);
            auto powers = battery_candidates(b, st.soc, grid.n_batt);
            for (double lam : prices) {
                for (double pb : powers) {
                    StepResult r = step_applied(s, st, lam, pb, /*build_obs=*/false);
                    DpKey nk;
                    nk.t = t + 1;
                    nk.soc_idx = nearest_bucket(r.next_state.soc);
                    nk.sat_sum = r.next_state.sat_sum;
                    nk.lam_bits = bits_of(r.outcome.applied_price);
                    nk.bl_bits =
                        beta_static ? 0 : bits_of(r.next_state.penalty_state.beta_lin);
                    nk.bs_bits =
                        beta_static ? 0 : bits_of(r.next_state.penalty_state.beta_sqr);
                    double value = node.value + r.outcome.reward;

                    auto it = next.find(nk);
                    if (it == next.end()) {
                        next.emplace(nk, DpNode{value, key,
                                                r.outcome.applied_price,
                                                r.outcome.applied_battery});
                        ++total_states;
                        if (total_states > state_guard)
                            throw GuardError("dp_optimal: state space guard exceeded");
                    } else if (value > it->second.value) {
                        it->second =
                            DpNode{value, key, r.outcome.applied_price,
                                   r.outcome.applied_battery};
                    } else if (value == it->second.value) {
                        // Exact tie: keep the lexicographically smaller prefix.
                        Actions challenger = reconstruct(stages, key);
                        challenger.emplace_back(r.outcome.applied_price,
                                                r.outcome.applied_battery);
                        Actions incumbent = reconstruct(stages, nk);
                        if (challenger < incumbent)
                            it->second =
                                DpNode{value, key, r.outcome.applied_price,
                                       r.outcome.applied_battery};
                    }
                }
            }
        }
    }

    // Best terminal state; exact ties resolved by full-sequence order.
    const Stage& last = stages[s.horizon];
    if (last.empty()) throw GuardError("dp_optimal: empty terminal stage");
    const DpKey* best_key = nullptr;
    double best_value = -std::numeric_limits<double>::infinity();
    Actions best_seq;
    for (const auto& [key, node] : last) {
        if (node.value > best_value) {
            best_value = node.value;
            best_key = &key;
            best_seq = reconstruct(stages, key);
        } else if (node.value == best_value) {
            Actions seq = reconstruct(stages, key);
            if (seq < best_seq) {
                best_key = &key;
                best_seq = std::move(seq);
            }
        }
    }
    (void)best_key;

    OracleResult res;
    res.best_actions = best_seq;
    res.discretized_value = best_value;
    res.best_value = replay(s, best_seq, res.trace);
    return res;
}

CertifyResult certify(const approx::ActorArch& arch, const approx::Bundle& params,
                      const Scenario& s, const GridSpec& grid, int soc_levels,
                      int sat_levels) {
    CertifyResult res;
    if (sat_levels <= 0) sat_levels = 10 * s.n_users() * s.horizon + 1;
    res.oracle = dp_optimal(s, grid, soc_levels, sat_levels);
    td3::EvalResult ev = td3::evaluate(arch, params, s, 1);
    res.agent_return = ev.mean_return;
    res.agent_day_satisfaction = ev.mean_day_satisfaction;
    res.agent_trace = ev.traces.empty() ? std::vector<StepOutcome>{} : ev.traces[0];
    res.ratio = res.agent_return / res.oracle.best_value;
    return res;
}

}  // namespace drplab::oracle
