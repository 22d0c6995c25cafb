#include "drplab/scenario_io.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drplab/series_io.hpp"
#include "drplab/util/errors.hpp"

namespace drplab {

namespace {

// Scalars broadcast to a full per-period array; sequences must match horizon.
std::vector<double> period_array(const YAML::Node& node, int horizon, const std::string& key) {
    if (!node) throw ValidationError("scenario: missing key " + key);
    std::vector<double> out;
    if (node.IsSequence()) {
        for (const auto& v : node) out.push_back(v.as<double>());
    } else {
        out.assign(horizon, node.as<double>());
    }
    return out;
}

double num(const YAML::Node& n, const std::string& key, double fallback) {
    return n[key] ? n[key].as<double>() : fallback;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void emit_array(std::ostream& os, const std::string& key, const std::vector<double>& a,
                int indent) {
    std::string pad(indent, ' ');
    os << pad << key << ": [";
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) os << ", ";
        os << fmt(a[i]);
    }
    os << "]\n";
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw IoError("cannot parse scenario " + path + ": " + e.what());
    }

    Scenario s;
    s.horizon = root["horizon"] ? root["horizon"].as<int>() : 24;
    s.t_his = root["t_his"] ? root["t_his"].as<int>() : 24;
    s.t_pre = root["t_pre"] ? root["t_pre"].as<int>() : 8;

    if (!root["users"] || !root["users"].IsSequence())
        throw ValidationError("scenario: users must be a sequence");
    for (const auto& un : root["users"]) {
        UserProfile u;
        u.u_a = un["u_a"].as<double>();
        u.u_b = un["u_b"].as<double>();
        u.epsilon = num(un, "epsilon", 0.05);
        u.d_lo = period_array(un["d_lo"], s.horizon, "users[].d_lo");
        u.d_hi = period_array(un["d_hi"], s.horizon, "users[].d_hi");
        u.d_ideal = period_array(un["d_ideal"], s.horizon, "users[].d_ideal");
        s.users.push_back(std::move(u));
    }

    if (auto n = root["satisfaction"]) {
        s.satisfaction.omega1 = num(n, "omega1", 4.0);
        s.satisfaction.omega2 = num(n, "omega2", 3.0);
    }
    if (auto n = root["battery"]) {
        BatterySpec b;
        b.p_min = num(n, "p_min", b.p_min);
        b.p_max = num(n, "p_max", b.p_max);
        b.soc_min = num(n, "soc_min", b.soc_min);
        b.soc_max = num(n, "soc_max", b.soc_max);
        b.eta_ch = num(n, "eta_ch", b.eta_ch);
        b.eta_dis = num(n, "eta_dis", b.eta_dis);
        b.capacity = num(n, "capacity", b.capacity);
        b.alpha_b = num(n, "alpha_b", b.alpha_b);
        b.soc0 = num(n, "soc0", b.soc0);
        s.battery = b;
    }
    if (auto n = root["pricing"]) {
        PricingRules r;
        r.k1 = num(n, "k1", r.k1);
        r.k2 = num(n, "k2", r.k2);
        r.delta_lambda = num(n, "delta_lambda", r.delta_lambda);
        r.rho_res = num(n, "rho_res", r.rho_res);
        s.pricing = r;
    }
    if (auto n = root["penalty"]) {
        PenaltyConfig p;
        p.c_bound = n["c_bound"] ? n["c_bound"].as<int>() : p.c_bound;
        p.beta_lin0 = num(n, "beta_lin0", p.beta_lin0);
        p.beta_sqr0 = num(n, "beta_sqr0", p.beta_sqr0);
        p.eta_lin = num(n, "eta_lin", p.eta_lin);
        p.eta_sqr = num(n, "eta_sqr", p.eta_sqr);
        p.beta_cap = num(n, "beta_cap", p.beta_cap);
        if (n["persist_across_episodes"])
            p.persist_across_episodes = n["persist_across_episodes"].as<bool>();
        s.penalty = p;
    }

    YAML::Node m = root["market"];
    if (!m) throw ValidationError("scenario: missing market block");
    if (m["pv_file"] || m["price_file"]) {
        if (!m["pv_file"] || !m["price_file"])
            throw ValidationError("scenario: pv_file and price_file must appear together");
        auto dir = std::filesystem::path(path).parent_path();
        auto resolve = [&dir](const std::string& p) {
            std::filesystem::path fp(p);
            return fp.is_absolute() ? fp.string() : (dir / fp).string();
        };
        LoadedSeries pv = load_series(resolve(m["pv_file"].as<std::string>()), "kw");
        LoadedSeries price =
            load_series(resolve(m["price_file"].as<std::string>()), "currency_per_kwh");
        pv = scale_series(std::move(pv), num(m, "pv_scale", 1.0));
        price = scale_series(std::move(price), num(m, "price_scale", 1.0));
        if (pv.epochs != price.epochs)
            throw ValidationError("scenario: pv_file and price_file timestamps differ");
        s.market.pv = std::move(pv.values);
        s.market.dso_price = std::move(price.values);
        s.market.calendar = std::move(pv.calendar);
    } else {
        for (const auto& v : m["pv"]) s.market.pv.push_back(v.as<double>());
        for (const auto& v : m["dso_price"]) s.market.dso_price.push_back(v.as<double>());
        if (m["start"]) {
            std::int64_t start = parse_timestamp(m["start"].as<std::string>());
            for (std::size_t k = 0; k < s.market.pv.size(); ++k)
                s.market.calendar.push_back(calendar_of_epoch(start + 3600LL * (std::int64_t)k));
        } else if (m["calendar"]) {
            for (const auto& c : m["calendar"]) {
                s.market.calendar.push_back(
                    CalendarEntry{c[0].as<int>(), c[1].as<int>(), c[2].as<int>()});
            }
        } else {
            throw ValidationError("scenario: market needs either start or calendar");
        }
    }
    return s;
}

std::string scenario_to_yaml(const Scenario& s, std::optional<std::int64_t> start) {
    std::ostringstream os;
    os << "# drplab scenario\n";
    os << "horizon: " << s.horizon << "   # periods (hours)\n";
    os << "t_his: " << s.t_his << "     # history window (periods)\n";
    os << "t_pre: " << s.t_pre << "      # forecast window (periods)\n";
    os << "users:   # u_a currency/kW^2, u_b currency/kW, demand arrays kW\n";
    for (const auto& u : s.users) {
        os << "  - u_a: " << fmt(u.u_a) << "\n";
        os << "    u_b: " << fmt(u.u_b) << "\n";
        os << "    epsilon: " << fmt(u.epsilon) << "\n";
        emit_array(os, "d_lo", u.d_lo, 4);
        emit_array(os, "d_hi", u.d_hi, 4);
        emit_array(os, "d_ideal", u.d_ideal, 4);
    }
    os << "satisfaction:   # score-point weights\n";
    os << "  omega1: " << fmt(s.satisfaction.omega1) << "\n";
    os << "  omega2: " << fmt(s.satisfaction.omega2) << "\n";
    const BatterySpec& b = s.battery;
    os << "battery:   # power kW, capacity kWh, soc fractions\n";
    os << "  p_min: " << fmt(b.p_min) << "\n  p_max: " << fmt(b.p_max) << "\n";
    os << "  soc_min: " << fmt(b.soc_min) << "\n  soc_max: " << fmt(b.soc_max) << "\n";
    os << "  eta_ch: " << fmt(b.eta_ch) << "\n  eta_dis: " << fmt(b.eta_dis) << "\n";
    os << "  capacity: " << fmt(b.capacity) << "\n  alpha_b: " << fmt(b.alpha_b) << "\n";
    os << "  soc0: " << fmt(b.soc0) << "\n";
    const PricingRules& r = s.pricing;
    os << "pricing:   # multipliers dimensionless, delta_lambda and rho_res currency/kWh\n";
    os << "  k1: " << fmt(r.k1) << "\n  k2: " << fmt(r.k2) << "\n";
    os << "  delta_lambda: " << fmt(r.delta_lambda) << "\n";
    os << "  rho_res: " << fmt(r.rho_res) << "\n";
    const PenaltyConfig& p = s.penalty;
    os << "penalty:   # c_bound score points; coefficients currency per point\n";
    os << "  c_bound: " << p.c_bound << "\n";
    os << "  beta_lin0: " << fmt(p.beta_lin0) << "\n  beta_sqr0: " << fmt(p.beta_sqr0) << "\n";
    os << "  eta_lin: " << fmt(p.eta_lin) << "\n  eta_sqr: " << fmt(p.eta_sqr) << "\n";
    os << "  beta_cap: " << fmt(p.beta_cap) << "\n";
    os << "  persist_across_episodes: " << (p.persist_across_episodes ? "true" : "false")
       << "\n";
    os << "market:   # pv kW, dso_price currency/kWh, hourly from start\n";
    if (start) {
        std::tm tm{};
        std::time_t t = static_cast<std::time_t>(*start);
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
        os << "  start: \"" << buf << "\"\n";
    } else {
        os << "  calendar: [";
        for (std::size_t i = 0; i < s.market.calendar.size(); ++i) {
            const auto& c = s.market.calendar[i];
            if (i) os << ", ";
            os << "[" << c.hour << ", " << c.week << ", " << c.month << "]";
        }
        os << "]\n";
    }
    emit_array(os, "pv", s.market.pv, 2);
    emit_array(os, "dso_price", s.market.dso_price, 2);
    return os.str();
}

void save_scenario(const std::string& path, const Scenario& s,
                   std::optional<std::int64_t> start) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write scenario file " + path);
    out << scenario_to_yaml(s, start);
}

}  // namespace drplab
