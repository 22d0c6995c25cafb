#pragma once

#include <utility>
#include <vector>

#include "drplab/approx/networks.hpp"
#include "drplab/market_env.hpp"
#include "drplab/scenario.hpp"

namespace drplab::oracle {

struct GridSpec {
    int n_price = 3;      // price grid points per period
    int n_batt = 3;       // battery grid points
    int max_horizon = 6;  // largest episode length the search accepts
};

struct OracleResult {
    double best_value = 0.0;  // total reward of best_actions replayed exactly
    std::vector<std::pair<double, double>> best_actions;  // applied (lambda, p_b)
    std::vector<StepOutcome> trace;
    // Internal optimum of the discretized system; differs from best_value
    // only when state-of-charge bucketing rounds (dynamic programming path).
    double discretized_value = 0.0;
};

// Applied-price candidates for period t: an n_price grid over the hard bounds
// [k1, k2] * dso_price, each point clipped into the ramp-intersected feasible
// interval, deduplicated ascending. Every candidate passes through
// step_applied unchanged, which keeps search and replay bit-identical.
std::vector<double> price_candidates(const Scenario& s, int t,
                                     std::optional<double> lambda_prev, int n_price);

// Applied-power candidates: an n_batt grid over [p_min, p_max], clipped to
// what the state of charge admits, deduplicated ascending.
std::vector<double> battery_candidates(const BatterySpec& b, double soc, int n_batt);

// Enumerates every candidate action sequence through the true environment.
// Ties break toward the lexicographically smallest action sequence. The
// parallel flag splits the root actions across OpenMP threads; results are
// identical to the serial walk.
OracleResult exhaustive_optimal(const Scenario& s, const GridSpec& grid,
                                bool parallel = false);

// Dynamic program over (t, soc bucket, previous applied price, cumulative
// integer satisfaction sum, penalty coefficients). Satisfaction and the
// coefficient pair are exact; only soc is bucketed (nearest of soc_levels
// uniform points). sat_levels must cover the worst-case score sum
// 10 * n_users * horizon. Always runs with per-episode penalty coefficients.
OracleResult dp_optimal(const Scenario& s, const GridSpec& grid, int soc_levels,
                        int sat_levels);

struct CertifyResult {
    double ratio = 0.0;  // agent return / oracle best value; may exceed 1
    double agent_return = 0.0;
    double agent_day_satisfaction = 0.0;
    OracleResult oracle;
    std::vector<StepOutcome> agent_trace;
};

CertifyResult certify(const approx::ActorArch& arch, const approx::Bundle& params,
                      const Scenario& s, const GridSpec& grid, int soc_levels = 33,
                      int sat_levels = 0 /* 0 = exact bound */);

}  // namespace drplab::oracle
