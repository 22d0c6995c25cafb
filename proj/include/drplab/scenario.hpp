#pragma once

#include <string>
#include <vector>

namespace drplab {

// One end-user of the pricing program. The demand bounds and the ideal
// demand are per-period arrays of length Scenario::horizon.
struct UserProfile {
    double u_a = -0.05;    // utility curvature, currency/kW^2, < 0
    double u_b = 1.0;      // utility slope, currency/kW, > 0
    double epsilon = 0.05; // at-limit tolerance, kW
    std::vector<double> d_lo;
    std::vector<double> d_hi;
    std::vector<double> d_ideal;
};

struct SatisfactionConfig {
    double omega1 = 4.0;  // weight of the ideal-demand deviation index
    double omega2 = 3.0;  // weight of the consumption-variation index
};

struct BatterySpec {
    double p_min = -10.0;  // kW, charge/discharge power bounds, p_min <= 0 <= p_max
    double p_max = 10.0;
    double soc_min = 0.1;  // state of charge as a capacity fraction
    double soc_max = 0.9;
    double eta_ch = 0.95;
    double eta_dis = 0.95;
    double capacity = 50.0;  // kWh; 0 disables the battery entirely
    double alpha_b = 0.01;   // quadratic utilization cost, currency/kW^2
    double soc0 = 0.5;
};

struct PricingRules {
    double k1 = 1.0;            // lower price multiplier on the DSO price
    double k2 = 2.0;            // upper price multiplier
    double delta_lambda = 0.05; // per-period price ramp limit, currency/kWh
    double rho_res = 0.1;       // unused-renewable penalty price, currency/kWh
};

struct PenaltyConfig {
    int c_bound = 7;           // satisfaction threshold, integer score points
    double beta_lin0 = 10.0;   // initial linear coefficient
    double beta_sqr0 = 20.0;   // initial squared coefficient
    double eta_lin = 5.0;      // linear ascent step
    double eta_sqr = 1.0;      // squared ascent step
    double beta_cap = 1000.0;  // upper cap on both coefficients
    bool persist_across_episodes = true;
};

struct CalendarEntry {
    int hour = 0;   // 0..23
    int week = 0;   // 0..51
    int month = 0;  // 0..11
};

struct MarketSeries {
    std::vector<double> pv;         // renewable generation, kW
    std::vector<double> dso_price;  // wholesale price, currency/kWh
    std::vector<CalendarEntry> calendar;

    std::size_t size() const { return pv.size(); }
};

struct Scenario {
    std::vector<UserProfile> users;
    SatisfactionConfig satisfaction;
    BatterySpec battery;
    PricingRules pricing;
    PenaltyConfig penalty;
    MarketSeries market;
    int horizon = 24;  // episode length in hourly periods
    int t_his = 24;    // history window length
    int t_pre = 8;     // forecast window length

    int n_users() const { return static_cast<int>(users.size()); }
    int seq_len() const { return t_his + t_pre; }
    int obs_len() const { return 2 * seq_len() + 8; }
    // One extra sample so the terminal observation at t = horizon can be built.
    std::size_t required_market_len() const {
        return static_cast<std::size_t>(horizon + t_pre + 1);
    }
};

// Returns an empty list iff every invariant holds. Each violation names the
// offending field and the rule it breaks. Pure; never throws on bad values.
std::vector<std::string> validate_scenario(const Scenario& s);

// Throws ValidationError listing all violations.
void require_valid(const Scenario& s);

}  // namespace drplab
