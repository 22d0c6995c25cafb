#include "drplab/market_env.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drplab/user_model.hpp"
#include "drplab/util/errors.hpp"

namespace drplab {

std::vector<double> Observation::flatten() const {
    std::vector<double> flat;
    flat.reserve(size());
    flat.insert(flat.end(), pv_window.begin(), pv_window.end());
    flat.insert(flat.end(), dso_window.begin(), dso_window.end());
    flat.insert(flat.end(), scalars.begin(), scalars.end());
    return flat;
}

std::array<double, 6> encode_time(int hour, int week, int month) {
    if (hour < 0 || hour > 23)
        throw ValidationError("encode_time: hour " + std::to_string(hour) + " outside [0, 23]");
    if (week < 0 || week > 51)
        throw ValidationError("encode_time: week " + std::to_string(week) + " outside [0, 51]");
    if (month < 0 || month > 11)
        throw ValidationError("encode_time: month " + std::to_string(month) + " outside [0, 11]");
    const double two_pi = 2.0 * M_PI;
    double ha = two_pi * hour / 23.0;
    double wa = two_pi * week / 51.0;
    double ma = two_pi * month / 11.0;
    return {std::sin(ha), std::cos(ha), std::sin(wa), std::cos(wa), std::sin(ma), std::cos(ma)};
}

Observation build_observation(const Scenario& s, const EnvState& st) {
    const MarketSeries& m = s.market;
    const int t = st.t;
    const int len = static_cast<int>(m.size());
    const int last_needed = t + s.t_pre;
    if (last_needed >= len) {
        std::ostringstream os;
        os << "build_observation: series of length " << len << " cannot cover index "
           << last_needed << " needed at t=" << t;
        throw ValidationError(os.str());
    }

    Observation obs;
    obs.pv_window.resize(s.seq_len());
    obs.dso_window.resize(s.seq_len());
    for (int j = 0; j < s.seq_len(); ++j) {
        int k = t - s.t_his + 1 + j;
        if (k < 0) k = 0;  // repeat the earliest sample before the dataset begins
        obs.pv_window[j] = m.pv[k];
        obs.dso_window[j] = m.dso_price[k];
    }

    double c_prev_ave = (t == 0) ? static_cast<double>(s.penalty.c_bound)
                                 : running_average_from_sum(st.sat_sum, t, s.n_users());
    const CalendarEntry& cal = m.calendar[t];
    auto ta = encode_time(cal.hour, cal.week, cal.month);
    obs.scalars = {c_prev_ave, st.soc, ta[0], ta[1], ta[2], ta[3], ta[4], ta[5]};
    return obs;
}

PriceInterval feasible_price_interval(const PricingRules& rules, double dso_price,
                                      std::optional<double> lambda_prev) {
    double hard_lo = rules.k1 * dso_price;
    double hard_hi = rules.k2 * dso_price;
    if (!lambda_prev) return {hard_lo, hard_hi};

    double lo = std::max(hard_lo, *lambda_prev - rules.delta_lambda);
    double hi = std::min(hard_hi, *lambda_prev + rules.delta_lambda);
    if (lo > hi) {
        // Hard bounds win over the ramp: stay as close to the old price as allowed.
        double pin = std::clamp(*lambda_prev, hard_lo, hard_hi);
        return {pin, pin};
    }
    return {lo, hi};
}

double max_charge_power(const BatterySpec& b, double soc) {
    double headroom = std::max(0.0, (b.soc_max - soc) * b.capacity / b.eta_ch);
    return std::min(std::max(0.0, b.p_max), headroom);
}

double max_discharge_power(const BatterySpec& b, double soc) {
    double depth = std::max(0.0, (soc - b.soc_min) * b.capacity * b.eta_dis);
    return std::max(std::min(0.0, b.p_min), -depth);
}

namespace {

double clip_battery(const BatterySpec& b, double soc, double p_req) {
    return std::clamp(p_req, max_discharge_power(b, soc), max_charge_power(b, soc));
}

}  // namespace

std::pair<double, double> map_action(ActionRaw a, const PriceInterval& interval,
                                     const BatterySpec& battery, double soc) {
    double lambda = interval.mid() + a.a1 * interval.halfwidth();
    double p_raw = battery.p_min + 0.5 * (a.a2 + 1.0) * (battery.p_max - battery.p_min);
    return {lambda, clip_battery(battery, soc, p_raw)};
}

double battery_step(const BatterySpec& b, double soc, double p_b) {
    if (b.capacity <= 0.0) return soc;
    return soc + std::max(0.0, p_b) * b.eta_ch / b.capacity +
           std::min(0.0, p_b) / (b.eta_dis * b.capacity);
}

std::pair<double, double> settle_power(double pv, const std::vector<double>& demands,
                                       double p_b) {
    double net = p_b - pv;
    for (double d : demands) net += d;
    return {std::max(0.0, net), std::max(0.0, -net)};
}

double reward(double lambda, const std::vector<double>& demands, double p_dso,
              double lambda_dso, double p_b, double p_neg, double penalty_value,
              const BatterySpec& battery, const PricingRules& rules) {
    double revenue = 0.0;
    for (double d : demands) revenue += lambda * d;
    return revenue - p_dso * lambda_dso - battery.alpha_b * p_b * p_b -
           rules.rho_res * p_neg - penalty_value;
}

namespace {

// Common pipeline once the applied (price, power) pair is fixed.
StepResult step_with(const Scenario& s, const EnvState& st, double lambda, double p_b,
                     bool build_obs) {
    const int t = st.t;
    StepResult res;
    StepOutcome& out = res.outcome;
    out.applied_price = lambda;
    out.applied_battery = p_b;

    const int n = s.n_users();
    out.demands.resize(n);
    out.scores.resize(n);
    long score_sum = 0;
    for (int i = 0; i < n; ++i) {
        UserStepResult ur = user_step(s.users[i], s.satisfaction, lambda, st.d_prev[i], t);
        out.demands[i] = ur.demand;
        out.scores[i] = ur.satisfaction;
        score_sum += ur.satisfaction;
    }

    long sat_sum = st.sat_sum + score_sum;
    out.c_ave = running_average_from_sum(sat_sum, t + 1, n);

    double c_bound = static_cast<double>(s.penalty.c_bound);
    out.penalty = combined_penalty(st.penalty_state, c_bound, out.c_ave);
    PenaltyState penalty_next = update_coefficients(st.penalty_state, c_bound, out.c_ave);

    double soc_next = battery_step(s.battery, st.soc, p_b);
    auto [p_dso, p_neg] = settle_power(s.market.pv[t], out.demands, p_b);
    out.p_dso = p_dso;
    out.p_neg = p_neg;
    out.reward = reward(lambda, out.demands, p_dso, s.market.dso_price[t], p_b, p_neg,
                        out.penalty, s.battery, s.pricing);
    out.done = (t + 1 == s.horizon);
    out.soc_after = soc_next;
    out.beta_lin_after = penalty_next.beta_lin;
    out.beta_sqr_after = penalty_next.beta_sqr;

    res.next_state = st;
    res.next_state.t = t + 1;
    res.next_state.soc = soc_next;
    res.next_state.lambda_prev = lambda;
    res.next_state.d_prev = out.demands;
    res.next_state.sat_sum = sat_sum;
    res.next_state.penalty_state = penalty_next;
    if (build_obs) res.next_obs = build_observation(s, res.next_state);
    return res;
}

std::optional<double> prior_price(const EnvState& st) {
    if (st.t == 0) return std::nullopt;
    return st.lambda_prev;
}

void check_not_done(const Scenario& s, const EnvState& st) {
    if (st.t >= s.horizon)
        throw GuardError("step: episode already finished at t=" + std::to_string(st.t));
}

}  // namespace

StepResult step(const Scenario& s, const EnvState& st, ActionRaw a, bool build_obs) {
    check_not_done(s, st);
    PriceInterval interval =
        feasible_price_interval(s.pricing, s.market.dso_price[st.t], prior_price(st));
    auto [lambda, p_b] = map_action(a, interval, s.battery, st.soc);
    return step_with(s, st, lambda, p_b, build_obs);
}

StepResult step_applied(const Scenario& s, const EnvState& st, double lambda_req,
                        double p_req, bool build_obs) {
    check_not_done(s, st);
    PriceInterval interval =
        feasible_price_interval(s.pricing, s.market.dso_price[st.t], prior_price(st));
    double lambda = interval.clip(lambda_req);
    double p_b = clip_battery(s.battery, st.soc, p_req);
    return step_with(s, st, lambda, p_b, build_obs);
}

std::pair<EnvState, Observation> reset(const Scenario& s, std::uint64_t seed) {
    return reset_carry(s, seed, PenaltyState::initial(s.penalty));
}

std::pair<EnvState, Observation> reset_carry(const Scenario& s, std::uint64_t seed,
                                             const PenaltyState& carry) {
    EnvState st;
    st.t = 0;
    st.soc = s.battery.soc0;
    double lam0 = s.market.dso_price[0];
    st.lambda_prev = std::clamp(lam0, s.pricing.k1 * lam0, s.pricing.k2 * lam0);
    st.d_prev.resize(s.users.size());
    for (std::size_t i = 0; i < s.users.size(); ++i) st.d_prev[i] = s.users[i].d_ideal[0];
    st.sat_sum = 0;
    st.penalty_state = s.penalty.persist_across_episodes ? carry
                                                         : PenaltyState::initial(s.penalty);
    st.penalty_state.cfg = s.penalty;
    st.rng_seed = seed;
    return {st, build_observation(s, st)};
}

MarketEnv::MarketEnv(const Scenario& s) : scenario_(s) { require_valid(scenario_); }

const Observation& MarketEnv::reset(std::uint64_t seed) {
    if (has_state_) {
        auto [st, obs] = reset_carry(scenario_, seed, state_.penalty_state);
        state_ = std::move(st);
        obs_ = std::move(obs);
    } else {
        auto [st, obs] = drplab::reset(scenario_, seed);
        state_ = std::move(st);
        obs_ = std::move(obs);
        has_state_ = true;
    }
    return obs_;
}

StepOutcome MarketEnv::step(ActionRaw a) {
    StepResult r = drplab::step(scenario_, state_, a);
    state_ = std::move(r.next_state);
    obs_ = std::move(r.next_obs);
    return r.outcome;
}

StepOutcome MarketEnv::step_applied(double lambda_req, double p_req) {
    StepResult r = drplab::step_applied(scenario_, state_, lambda_req, p_req);
    state_ = std::move(r.next_state);
    obs_ = std::move(r.next_obs);
    return r.outcome;
}

}  // namespace drplab
