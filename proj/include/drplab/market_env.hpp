#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "drplab/penalty.hpp"
#include "drplab/scenario.hpp"

namespace drplab {

struct EnvState {
    int t = 0;
    double soc = 0.0;
    double lambda_prev = 0.0;      // applied price of period t-1; ramp is inactive at t = 0
    std::vector<double> d_prev;    // previous per-user demand, kW
    long sat_sum = 0;              // cumulative integer score sum over elapsed periods
    PenaltyState penalty_state;
    std::uint64_t rng_seed = 0;    // environment stream seed, independent of exploration
};

// Agent-facing observation: two market windows plus eight scalars
// (c_prev_ave, soc, and the three sine-cosine time pairs).
struct Observation {
    std::vector<double> pv_window;
    std::vector<double> dso_window;
    std::array<double, 8> scalars{};

    std::size_t size() const { return pv_window.size() + dso_window.size() + scalars.size(); }
    std::vector<double> flatten() const;
};

struct ActionRaw {
    double a1 = 0.0;  // price component, [-1, 1]
    double a2 = 0.0;  // battery component, [-1, 1]
};

struct StepOutcome {
    double applied_price = 0.0;
    double applied_battery = 0.0;
    std::vector<double> demands;
    double p_dso = 0.0;
    double p_neg = 0.0;
    std::vector<int> scores;
    double c_ave = 0.0;
    double penalty = 0.0;
    double reward = 0.0;
    bool done = false;
    // carried for trace export
    double soc_after = 0.0;
    double beta_lin_after = 0.0;
    double beta_sqr_after = 0.0;
};

struct PriceInterval {
    double lo = 0.0;
    double hi = 0.0;
    double mid() const { return 0.5 * (lo + hi); }
    double halfwidth() const { return 0.5 * (hi - lo); }
    double clip(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
};

// (sin, cos) pairs for hour/week/month with divisors 23, 51, 11.
// Throws ValidationError on an out-of-range component.
std::array<double, 6> encode_time(int hour, int week, int month);

// Windows cover series indices t - t_his + 1 .. t + t_pre, left-padded with
// the first sample when the episode start has no history. Valid for any
// t in [0, horizon]; throws on insufficient series coverage.
Observation build_observation(const Scenario& s, const EnvState& st);

// Intersection of the hard bounds [k1, k2] * dso_price with the ramp window
// around lambda_prev. An empty intersection degenerates to the point closest
// to lambda_prev that the hard bounds allow.
PriceInterval feasible_price_interval(const PricingRules& rules, double dso_price,
                                      std::optional<double> lambda_prev);

// Largest battery charge power (>= 0) and discharge power (<= 0) that keep
// the state of charge inside its bounds after one period.
double max_charge_power(const BatterySpec& b, double soc);
double max_discharge_power(const BatterySpec& b, double soc);

// Maps raw agent outputs onto an applied (price, battery power) pair:
// price by midpoint + a1 * halfwidth, battery by affine [-1,1] -> [p_min,p_max]
// followed by the state-of-charge feasibility clip.
std::pair<double, double> map_action(ActionRaw a, const PriceInterval& interval,
                                     const BatterySpec& battery, double soc);

// One-hour state-of-charge update; power and energy coincide numerically.
double battery_step(const BatterySpec& b, double soc, double p_b);

// Net grid exchange: n = sum(demands) + p_b - pv; returns (max(0,n), max(0,-n)).
std::pair<double, double> settle_power(double pv, const std::vector<double>& demands,
                                       double p_b);

double reward(double lambda, const std::vector<double>& demands, double p_dso,
              double lambda_dso, double p_b, double p_neg, double penalty_value,
              const BatterySpec& battery, const PricingRules& rules);

struct StepResult {
    StepOutcome outcome;
    EnvState next_state;
    Observation next_obs;
};

// Full transition from raw agent actions. Throws when the episode is over.
// build_obs=false skips next-observation construction (search inner loops).
StepResult step(const Scenario& s, const EnvState& st, ActionRaw a, bool build_obs = true);

// Transition from explicit requested (price, power); requests are clipped to
// the same feasible sets map_action would produce. This is the oracle's and
// the trace-replay entry point.
StepResult step_applied(const Scenario& s, const EnvState& st, double lambda_req,
                        double p_req, bool build_obs = true);

std::pair<EnvState, Observation> reset(const Scenario& s, std::uint64_t seed);

// Same reset but keeps penalty coefficients from `carry` when the scenario
// says they persist across episodes.
std::pair<EnvState, Observation> reset_carry(const Scenario& s, std::uint64_t seed,
                                             const PenaltyState& carry);

// Single-owner convenience wrapper with gym-style reset/step.
class MarketEnv {
public:
    explicit MarketEnv(const Scenario& s);

    const Observation& reset(std::uint64_t seed);
    StepOutcome step(ActionRaw a);
    StepOutcome step_applied(double lambda_req, double p_req);

    const Observation& observation() const { return obs_; }
    const EnvState& state() const { return state_; }
    const Scenario& scenario() const { return scenario_; }
    bool done() const { return state_.t >= scenario_.horizon; }

private:
    Scenario scenario_;
    EnvState state_;
    Observation obs_;
    bool has_state_ = false;
};

}  // namespace drplab
