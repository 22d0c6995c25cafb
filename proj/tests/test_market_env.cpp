#include "doctest.h"
#include "drplab/market_env.hpp"
#include "drplab/penalty.hpp"
#include "drplab/synth.hpp"
#include "drplab/user_model.hpp"
#include "drplab/util/errors.hpp"
#include "drplab/util/rng.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace drplab;

TEST_CASE("time encoding matches the printed divisors") {
    auto e0 = encode_time(0, 0, 0);
    CHECK(e0[0] == doctest::Approx(0.0));
    CHECK(e0[1] == doctest::Approx(1.0));

    auto e6 = encode_time(6, 10, 3);
    CHECK(e6[0] == doctest::Approx(std::sin(2.0 * M_PI * 6.0 / 23.0)));
    CHECK(e6[0] == doctest::Approx(0.99767).epsilon(1e-4));
    CHECK(e6[1] == doctest::Approx(-0.06824).epsilon(1e-3));

    // divisor 23 aliases hour 23 with hour 0, as printed
    auto e23 = encode_time(23, 0, 0);
    CHECK(e23[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(e23[1] == doctest::Approx(1.0));

    CHECK_THROWS_AS(encode_time(24, 0, 0), ValidationError);
    CHECK_THROWS_AS(encode_time(0, 52, 0), ValidationError);
    CHECK_THROWS_AS(encode_time(0, 0, 12), ValidationError);
}

TEST_CASE("observation layout and padding") {
    Scenario s = synth_scenario(1, SynthProfile::Winter);
    auto [st, obs] = reset(s, 0);
    CHECK(obs.size() == 72);  // 2*(24+8) + 8
    CHECK(obs.flatten().size() == 72);

    // at t=0 the history side repeats the first sample
    for (int j = 0; j < s.t_his - 1; ++j) {
        CHECK(obs.pv_window[j] == s.market.pv[0]);
        CHECK(obs.dso_window[j] == s.market.dso_price[0]);
    }
    // window is inclusive of t + t_pre
    CHECK(obs.pv_window.back() == s.market.pv[s.t_pre]);

    // previous average satisfaction scalar starts at the bound
    CHECK(obs.scalars[0] == doctest::Approx(7.0));
    CHECK(obs.scalars[1] == doctest::Approx(s.battery.soc0));
    for (int k = 2; k < 8; ++k) {
        CHECK(obs.scalars[k] >= -1.0);
        CHECK(obs.scalars[k] <= 1.0);
    }

    // constant series stays constant through the slicing
    Scenario flat = testing::tiny_scenario();
    auto [st2, obs2] = reset(flat, 0);
    for (double v : obs2.pv_window) CHECK(v == doctest::Approx(1.0));

    // insufficient coverage is rejected
    Scenario shortx = testing::tiny_scenario();
    EnvState fake;
    fake.t = shortx.horizon + 10;
    fake.soc = 0.5;
    fake.d_prev = {7.0};
    CHECK_THROWS_AS(build_observation(shortx, fake), ValidationError);
}

TEST_CASE("feasible price interval") {
    PricingRules r{1.0, 2.0, 0.05, 0.1};
    auto iv = feasible_price_interval(r, 0.1, 0.12);
    CHECK(iv.lo == doctest::Approx(0.1));
    CHECK(iv.hi == doctest::Approx(0.17));

    auto free_iv = feasible_price_interval(r, 0.1, std::nullopt);
    CHECK(free_iv.lo == doctest::Approx(0.1));
    CHECK(free_iv.hi == doctest::Approx(0.2));

    PricingRules tight{1.0, 2.0, 0.01, 0.1};
    auto pin = feasible_price_interval(tight, 0.1, 0.5);
    CHECK(pin.lo == doctest::Approx(0.2));
    CHECK(pin.hi == doctest::Approx(0.2));
}

TEST_CASE("action mapping") {
    BatterySpec b{-10.0, 10.0, 0.1, 0.9, 0.95, 0.95, 100.0, 0.01, 0.5};
    PriceInterval iv{0.1, 0.2};

    auto [lam_mid, p_mid] = map_action(ActionRaw{0.0, 0.0}, iv, b, 0.5);
    CHECK(lam_mid == doctest::Approx(0.15));
    CHECK(p_mid == doctest::Approx(0.0));

    auto [lam_hi, p_lo] = map_action(ActionRaw{1.0, -1.0}, iv, b, 0.5);
    CHECK(lam_hi == doctest::Approx(0.2));
    CHECK(p_lo == doctest::Approx(-10.0));

    auto [lam, p_full] = map_action(ActionRaw{0.0, 1.0}, iv, b, 0.9);
    CHECK(p_full == doctest::Approx(0.0));  // no headroom at soc_max
    (void)lam;
}

TEST_CASE("battery step") {
    BatterySpec b{-20.0, 20.0, 0.0, 1.0, 0.95, 0.95, 100.0, 0.01, 0.5};
    CHECK(battery_step(b, 0.5, 10.0) == doctest::Approx(0.595));
    CHECK(battery_step(b, 0.5, 0.0) == doctest::Approx(0.5));
    CHECK(battery_step(b, 0.5, -10.0) == doctest::Approx(0.5 - 10.0 / 95.0));

    BatterySpec none = b;
    none.capacity = 0.0;
    CHECK(battery_step(none, 0.5, 10.0) == doctest::Approx(0.5));
}

TEST_CASE("settlement orientation") {
    auto [dso1, neg1] = settle_power(50.0, {30.0}, 10.0);
    CHECK(dso1 == doctest::Approx(0.0));
    CHECK(neg1 == doctest::Approx(10.0));

    auto [dso2, neg2] = settle_power(0.0, {30.0}, -5.0);
    CHECK(dso2 == doctest::Approx(25.0));
    CHECK(neg2 == doctest::Approx(0.0));

    auto [dso3, neg3] = settle_power(25.0, {30.0}, -5.0);
    CHECK(dso3 == doctest::Approx(0.0));
    CHECK(neg3 == doctest::Approx(0.0));
}

TEST_CASE("reward assembly") {
    BatterySpec b{-10, 10, 0, 1, 1, 1, 100, 0.01, 0.5};
    PricingRules r{1.0, 2.0, 0.05, 0.1};
    std::vector<double> demands{40.0};
    CHECK(reward(0.15, demands, 25.0, 0.1, -5.0, 0.0, 0.0, b, r) == doctest::Approx(3.25));
    CHECK(reward(0.15, demands, 25.0, 0.1, -5.0, 0.0, 15.0, b, r) == doctest::Approx(-11.75));
    CHECK(reward(0.0, {0.0}, 0.0, 0.1, 0.0, 0.0, 0.0, b, r) == doctest::Approx(0.0));
}

TEST_CASE("fixed-bounds user ignores price") {
    Scenario s = testing::tiny_scenario();
    for (int t = 0; t < s.horizon; ++t) {
        s.users[0].d_lo[t] = 5.0;
        s.users[0].d_hi[t] = 5.0;
        s.users[0].d_ideal[t] = 5.0;
    }
    auto [st, obs] = reset(s, 0);
    for (double a1 : {-1.0, 0.0, 1.0}) {
        StepResult r = step(s, st, ActionRaw{a1, 0.0});
        CHECK(r.outcome.demands[0] == doctest::Approx(5.0));
    }
}

TEST_CASE("zero-capacity battery makes a2 irrelevant") {
    Scenario s = testing::tiny_scenario();
    s.battery.capacity = 0.0;
    MarketEnv env_a(s), env_b(s);
    env_a.reset(0);
    env_b.reset(0);
    Rng rng(23);
    for (int t = 0; t < s.horizon; ++t) {
        double a1 = rng.uniform(-1.0, 1.0);
        StepOutcome oa = env_a.step(ActionRaw{a1, -1.0});
        StepOutcome ob = env_b.step(ActionRaw{a1, 1.0});
        CHECK(oa.applied_battery == 0.0);
        CHECK(ob.applied_battery == 0.0);
        CHECK(oa.reward == ob.reward);
        CHECK(oa.soc_after == ob.soc_after);
    }
}

TEST_CASE("step composes the individually tested operations") {
    Scenario s = synth_scenario(3, SynthProfile::Summer);
    auto [st, obs] = reset(s, 0);
    ActionRaw a{0.3, -0.4};

    // by-hand composition at t=0
    PriceInterval iv = feasible_price_interval(s.pricing, s.market.dso_price[0], std::nullopt);
    auto [lam, p_b] = map_action(a, iv, s.battery, st.soc);
    std::vector<double> demands;
    long ssum = 0;
    std::vector<int> scores;
    for (int i = 0; i < s.n_users(); ++i) {
        UserStepResult ur = user_step(s.users[i], s.satisfaction, lam, st.d_prev[i], 0);
        demands.push_back(ur.demand);
        scores.push_back(ur.satisfaction);
        ssum += ur.satisfaction;
    }
    double c_ave = running_average_from_sum(ssum, 1, s.n_users());
    double pen = combined_penalty(st.penalty_state, s.penalty.c_bound, c_ave);
    double soc_next = battery_step(s.battery, st.soc, p_b);
    auto [p_dso, p_neg] = settle_power(s.market.pv[0], demands, p_b);
    double rew = reward(lam, demands, p_dso, s.market.dso_price[0], p_b, p_neg, pen,
                        s.battery, s.pricing);

    StepResult r = step(s, st, a);
    CHECK(r.outcome.applied_price == doctest::Approx(lam).epsilon(1e-15));
    CHECK(r.outcome.applied_battery == doctest::Approx(p_b).epsilon(1e-15));
    for (int i = 0; i < s.n_users(); ++i) {
        CHECK(r.outcome.demands[i] == doctest::Approx(demands[i]).epsilon(1e-15));
        CHECK(r.outcome.scores[i] == scores[i]);
    }
    CHECK(r.outcome.c_ave == doctest::Approx(c_ave).epsilon(1e-15));
    CHECK(r.outcome.penalty == doctest::Approx(pen).epsilon(1e-15));
    CHECK(r.outcome.reward == doctest::Approx(rew).epsilon(1e-15));
    CHECK(r.next_state.soc == doctest::Approx(soc_next).epsilon(1e-15));
    CHECK(r.next_state.t == 1);
    CHECK(!r.outcome.done);
}

TEST_CASE("stepping a finished episode throws") {
    Scenario s = testing::tiny_scenario();
    MarketEnv env(s);
    env.reset(0);
    for (int t = 0; t < s.horizon; ++t) env.step(ActionRaw{0, 0});
    CHECK(env.done());
    CHECK_THROWS_AS(env.step(ActionRaw{0, 0}), GuardError);
}

TEST_CASE("reset semantics and penalty persistence") {
    Scenario s = testing::tiny_scenario();
    auto [st1, o1] = reset(s, 42);
    auto [st2, o2] = reset(s, 42);
    CHECK(o1.flatten() == o2.flatten());
    CHECK(st1.lambda_prev == doctest::Approx(0.25));
    CHECK(st1.d_prev[0] == doctest::Approx(s.users[0].d_ideal[0]));
    CHECK(st1.sat_sum == 0);

    // persist=false restores the initial coefficients
    MarketEnv env(s);
    env.reset(0);
    for (int t = 0; t < s.horizon; ++t) env.step(ActionRaw{1.0, 0.0});
    env.reset(0);
    CHECK(env.state().penalty_state.beta_lin == doctest::Approx(s.penalty.beta_lin0));
    CHECK(env.state().penalty_state.beta_sqr == doctest::Approx(s.penalty.beta_sqr0));

    // persist=true carries them across the reset
    Scenario sp = s;
    sp.penalty.persist_across_episodes = true;
    MarketEnv envp(sp);
    envp.reset(0);
    for (int t = 0; t < sp.horizon; ++t) envp.step(ActionRaw{1.0, 0.0});
    double bl = envp.state().penalty_state.beta_lin;
    double bs = envp.state().penalty_state.beta_sqr;
    bool coeffs_moved = bl != sp.penalty.beta_lin0 || bs != sp.penalty.beta_sqr0;
    CHECK(coeffs_moved);
    envp.reset(0);
    CHECK(envp.state().penalty_state.beta_lin == doctest::Approx(bl));
    CHECK(envp.state().penalty_state.beta_sqr == doctest::Approx(bs));
}

TEST_CASE("episode invariants over randomized rollouts") {
    Rng rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        Scenario s = trial % 2 == 0 ? synth_scenario(trial, SynthProfile::Winter)
                                    : synth_scenario(trial, SynthProfile::Summer);
        MarketEnv env(s);
        env.reset(trial);
        double lambda_prev = 0.0;
        for (int t = 0; t < s.horizon; ++t) {
            double dso = s.market.dso_price[t];
            ActionRaw a{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            StepOutcome o = env.step(a);

            CHECK(o.p_dso * o.p_neg == 0.0);
            double sum_d = 0.0;
            for (double d : o.demands) sum_d += d;
            double balance = o.p_dso - o.p_neg - (sum_d + o.applied_battery - s.market.pv[t]);
            CHECK(std::abs(balance) < 1e-9);

            CHECK(env.state().soc >= s.battery.soc_min - 1e-12);
            CHECK(env.state().soc <= s.battery.soc_max + 1e-12);

            CHECK(o.applied_price >= s.pricing.k1 * dso - 1e-12);
            CHECK(o.applied_price <= s.pricing.k2 * dso + 1e-12);
            if (t > 0) {
                PriceInterval iv = feasible_price_interval(s.pricing, dso, lambda_prev);
                bool ramp_ok =
                    std::abs(o.applied_price - lambda_prev) <= s.pricing.delta_lambda + 1e-12;
                bool fallback = iv.lo == iv.hi;
                CHECK((ramp_ok || fallback));
            }
            lambda_prev = o.applied_price;
        }
    }
}

TEST_CASE("episodes are deterministic given scenario and seed") {
    Scenario s = synth_scenario(5, SynthProfile::Winter);
    auto roll = [&s]() {
        MarketEnv env(s);
        env.reset(123);
        Rng rng(321);
        std::vector<double> rewards;
        for (int t = 0; t < s.horizon; ++t)
            rewards.push_back(env.step(ActionRaw{rng.uniform(-1, 1), rng.uniform(-1, 1)}).reward);
        return rewards;
    };
    CHECK(roll() == roll());
}

TEST_CASE("penalty disabled equals unreachable bound with zero coefficients") {
    Scenario s = testing::tiny_scenario();
    Scenario off = s;
    off.penalty.beta_lin0 = 0.0;
    off.penalty.beta_sqr0 = 0.0;
    off.penalty.eta_lin = 0.0;
    off.penalty.eta_sqr = 0.0;

    Scenario bound0 = s;
    bound0.penalty.c_bound = 0;
    bound0.penalty.beta_lin0 = 0.0;
    bound0.penalty.beta_sqr0 = 0.0;
    bound0.penalty.eta_sqr = 0.0;  // linear update clamps at zero on its own

    MarketEnv env_off(off), env_b0(bound0);
    env_off.reset(0);
    env_b0.reset(0);
    Rng rng(77);
    for (int t = 0; t < s.horizon; ++t) {
        ActionRaw a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
        StepOutcome oa = env_off.step(a);
        StepOutcome ob = env_b0.step(a);
        CHECK(oa.penalty == 0.0);
        CHECK(ob.penalty == 0.0);
        CHECK(oa.reward == ob.reward);
    }
}
