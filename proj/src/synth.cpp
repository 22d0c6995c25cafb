#include "drplab/synth.hpp"

#include <algorithm>
#include <cmath>

#include "drplab/series_io.hpp"
#include "drplab/user_model.hpp"
#include "drplab/util/errors.hpp"
#include "drplab/util/rng.hpp"

namespace drplab {

SynthProfile synth_profile_from_string(const std::string& name) {
    if (name == "winter") return SynthProfile::Winter;
    if (name == "summer") return SynthProfile::Summer;
    throw ValidationError("unknown synth profile '" + name + "' (winter|summer)");
}

std::string to_string(SynthProfile p) {
    return p == SynthProfile::Winter ? "winter" : "summer";
}

std::int64_t synth_start_epoch(SynthProfile p) {
    // 2024-01-15T00:00:00Z and 2024-07-15T00:00:00Z
    return p == SynthProfile::Winter ? 1705276800LL : 1721001600LL;
}

namespace {

double bump(double h, double center, double width) {
    double z = (h - center) / width;
    return std::exp(-0.5 * z * z);
}

struct ProfileShape {
    double pv_peak, sunrise, sunset;
    double price_base, evening_amp, morning_amp;
};

ProfileShape shape_of(SynthProfile p) {
    if (p == SynthProfile::Winter) return {40.0, 8.0, 16.0, 0.28, 0.10, 0.05};
    return {180.0, 6.0, 20.0, 0.18, 0.08, 0.03};
}

}  // namespace

Scenario synth_scenario(std::uint64_t seed, SynthProfile profile) {
    const ProfileShape sh = shape_of(profile);
    const int n_steps = 48;  // two days: one episode plus forecast slack
    Rng rng(substream_seed(seed, profile == SynthProfile::Winter ? 101 : 202));

    Scenario s;
    s.horizon = 24;
    s.t_his = 24;
    s.t_pre = 8;

    std::int64_t start = synth_start_epoch(profile);
    s.market.pv.resize(n_steps);
    s.market.dso_price.resize(n_steps);
    s.market.calendar.resize(n_steps);
    for (int k = 0; k < n_steps; ++k) {
        double h = static_cast<double>(k % 24);
        double pv = 0.0;
        if (h > sh.sunrise && h < sh.sunset) {
            double phase = (h - sh.sunrise) / (sh.sunset - sh.sunrise);
            pv = sh.pv_peak * std::pow(std::sin(M_PI * phase), 1.3);
            pv *= 1.0 + 0.05 * (2.0 * rng.uniform() - 1.0);
        }
        s.market.pv[k] = std::max(0.0, pv);

        double price = sh.price_base + sh.evening_amp * bump(h, 19.0, 2.5) +
                       sh.morning_amp * bump(h, 8.0, 2.0);
        price *= 1.0 + 0.02 * (2.0 * rng.uniform() - 1.0);
        s.market.dso_price[k] = std::max(0.01, price);
        s.market.calendar[k] = calendar_of_epoch(start + 3600LL * k);
    }

    // Three heterogeneous users. The ideal demand tracks what each would buy
    // at a modest markup over the wholesale price, so high selling prices
    // read as dissatisfaction. Demand floors are staggered: as the price
    // climbs, users hit their limits one at a time and the average score
    // degrades gradually instead of falling off a single cliff.
    const double ua[3] = {-0.0050, -0.0045, -0.0055};
    const double ub[3] = {0.90, 1.00, 1.15};
    const double lo[3] = {40.0, 42.0, 36.0};
    const double hi[3] = {80.0, 85.0, 90.0};
    s.users.resize(3);
    for (int i = 0; i < 3; ++i) {
        UserProfile& u = s.users[i];
        u.u_a = ua[i];
        u.u_b = ub[i];
        u.epsilon = 0.05;
        u.d_lo.assign(s.horizon, lo[i]);
        u.d_hi.assign(s.horizon, hi[i]);
        u.d_ideal.resize(s.horizon);
        for (int t = 0; t < s.horizon; ++t) {
            double fair = 1.15 * s.market.dso_price[t];
            double want = (fair - u.u_b) / (2.0 * u.u_a);
            u.d_ideal[t] = std::clamp(want, lo[i], hi[i]);
        }
    }

    s.satisfaction = SatisfactionConfig{};  // omega1=4, omega2=3
    s.battery = BatterySpec{};              // 50 kWh, +/-10 kW
    s.pricing = PricingRules{};             // k1=1, k2=2, ramp 0.05, rho 0.1

    s.penalty = PenaltyConfig{};
    s.penalty.eta_lin = 5.0;
    s.penalty.eta_sqr = (profile == SynthProfile::Winter) ? 1.0 : 5.0;
    // Keeps the escalated penalty within an order of magnitude of the daily
    // revenue; the type default of 1000 drowns the economics on this scale.
    s.penalty.beta_cap = 200.0;

    return s;
}

}  // namespace drplab
