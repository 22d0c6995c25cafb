#include "drplab/scenario.hpp"

#include <cmath>
#include <sstream>

#include "drplab/util/errors.hpp"

namespace drplab {

namespace {

bool finite(double x) { return std::isfinite(x); }

void check_period_array(std::vector<std::string>& out, const std::string& name,
                        const std::vector<double>& a, int horizon) {
    if (static_cast<int>(a.size()) != horizon) {
        std::ostringstream os;
        os << name << ": length " << a.size() << " must equal horizon " << horizon;
        out.push_back(os.str());
    }
    for (double v : a) {
        if (!finite(v)) {
            out.push_back(name + ": values must be finite");
            break;
        }
    }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> v;
    auto fail = [&v](const std::string& msg) { v.push_back(msg); };

    if (s.horizon < 1) fail("horizon: must be >= 1");
    if (s.t_his < 1) fail("t_his: must be >= 1");
    if (s.t_pre < 0) fail("t_pre: must be >= 0");

    if (s.users.empty()) fail("users: must contain at least one user");
    for (std::size_t i = 0; i < s.users.size(); ++i) {
        const UserProfile& u = s.users[i];
        const std::string p = "users[" + std::to_string(i) + "]";
        if (!(u.u_a < 0.0) || !finite(u.u_a)) fail(p + ".u_a: must be negative");
        if (!(u.u_b > 0.0) || !finite(u.u_b)) fail(p + ".u_b: must be positive");
        if (u.epsilon < 0.0) fail(p + ".epsilon: must be >= 0");
        check_period_array(v, p + ".d_lo", u.d_lo, s.horizon);
        check_period_array(v, p + ".d_hi", u.d_hi, s.horizon);
        check_period_array(v, p + ".d_ideal", u.d_ideal, s.horizon);
        if (static_cast<int>(u.d_lo.size()) == s.horizon &&
            static_cast<int>(u.d_hi.size()) == s.horizon &&
            static_cast<int>(u.d_ideal.size()) == s.horizon) {
            for (int t = 0; t < s.horizon; ++t) {
                if (!(u.d_lo[t] <= u.d_ideal[t] && u.d_ideal[t] <= u.d_hi[t])) {
                    std::ostringstream os;
                    os << p << ".d_ideal[" << t << "]: must satisfy d_lo <= d_ideal <= d_hi";
                    fail(os.str());
                }
            }
        }
    }

    const SatisfactionConfig& sat = s.satisfaction;
    if (sat.omega1 < 0.0) fail("satisfaction.omega1: must be >= 0");
    if (sat.omega2 < 0.0) fail("satisfaction.omega2: must be >= 0");
    if (sat.omega1 + sat.omega2 > 10.0)
        fail("satisfaction.omega1+omega2: must be <= 10 so the limit weight stays nonnegative");

    const BatterySpec& b = s.battery;
    if (!(b.p_min <= 0.0 && 0.0 <= b.p_max)) fail("battery.p_min/p_max: must satisfy p_min <= 0 <= p_max");
    if (!(0.0 <= b.soc_min && b.soc_min < b.soc_max && b.soc_max <= 1.0))
        fail("battery.soc_min/soc_max: must satisfy 0 <= soc_min < soc_max <= 1");
    if (!(b.soc_min <= b.soc0 && b.soc0 <= b.soc_max))
        fail("battery.soc0: must lie in [soc_min, soc_max]");
    if (!(b.eta_ch > 0.0 && b.eta_ch <= 1.0)) fail("battery.eta_ch: must be in (0, 1]");
    if (!(b.eta_dis > 0.0 && b.eta_dis <= 1.0)) fail("battery.eta_dis: must be in (0, 1]");
    if (b.capacity < 0.0) fail("battery.capacity: must be >= 0");
    if (b.alpha_b < 0.0) fail("battery.alpha_b: must be >= 0");

    const PricingRules& r = s.pricing;
    if (!(r.k1 > 0.0)) fail("pricing.k1: must be > 0");
    if (!(r.k1 <= r.k2)) fail("pricing.k1/k2: must satisfy k1 <= k2");
    if (r.delta_lambda < 0.0) fail("pricing.delta_lambda: must be >= 0");
    if (r.rho_res < 0.0) fail("pricing.rho_res: must be >= 0");

    const PenaltyConfig& pc = s.penalty;
    if (pc.c_bound < 0 || pc.c_bound > 10) fail("penalty.c_bound: must be in [0, 10]");
    if (pc.beta_lin0 < 0.0) fail("penalty.beta_lin0: must be >= 0");
    if (pc.beta_sqr0 < 0.0) fail("penalty.beta_sqr0: must be >= 0");
    if (pc.eta_lin < 0.0) fail("penalty.eta_lin: must be >= 0");
    if (pc.eta_sqr < 0.0) fail("penalty.eta_sqr: must be >= 0");
    if (!(pc.beta_cap > pc.beta_lin0 && pc.beta_cap > pc.beta_sqr0))
        fail("penalty.beta_cap: must exceed both initial coefficients");

    const MarketSeries& m = s.market;
    if (m.pv.size() != m.dso_price.size() || m.pv.size() != m.calendar.size())
        fail("market: pv, dso_price and calendar must share one length");
    for (std::size_t i = 0; i < m.pv.size(); ++i) {
        if (!(m.pv[i] >= 0.0) || !finite(m.pv[i])) {
            fail("market.pv[" + std::to_string(i) + "]: must be >= 0");
            break;
        }
    }
    for (std::size_t i = 0; i < m.dso_price.size(); ++i) {
        if (!(m.dso_price[i] > 0.0) || !finite(m.dso_price[i])) {
            fail("market.dso_price[" + std::to_string(i) + "]: must be > 0");
            break;
        }
    }
    for (std::size_t i = 0; i < m.calendar.size(); ++i) {
        const CalendarEntry& c = m.calendar[i];
        if (c.hour < 0 || c.hour > 23 || c.week < 0 || c.week > 51 || c.month < 0 || c.month > 11) {
            fail("market.calendar[" + std::to_string(i) + "]: hour/week/month out of range");
            break;
        }
    }
    if (m.size() < s.required_market_len()) {
        std::ostringstream os;
        os << "market: length " << m.size() << " too short; needs horizon + t_pre + 1 = "
           << s.required_market_len() << " to cover every observation window";
        fail(os.str());
    }

    return v;
}

void require_valid(const Scenario& s) {
    auto violations = validate_scenario(s);
    if (violations.empty()) return;
    std::ostringstream os;
    os << "invalid scenario (" << violations.size() << " violations):";
    for (const auto& msg : violations) os << "\n  - " << msg;
    throw ValidationError(os.str());
}

}  // namespace drplab
