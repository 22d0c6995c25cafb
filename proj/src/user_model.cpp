#include "drplab/user_model.hpp"

#include <algorithm>
#include <cmath>

namespace drplab {

double optimal_demand(const UserProfile& u, double price, int t) {
    double stationary = (price - u.u_b) / (2.0 * u.u_a);
    return std::clamp(stationary, u.d_lo[t], u.d_hi[t]);
}

double welfare(const UserProfile& u, double demand, double price) {
    return u.u_a * demand * demand + u.u_b * demand - price * demand;
}

double deviation_index(const UserProfile& u, double demand, int t) {
    double denom = std::max(u.d_hi[t] - u.d_ideal[t], u.d_ideal[t] - u.d_lo[t]);
    if (denom <= 0.0) return 0.0;
    return std::abs(demand - u.d_ideal[t]) / denom;
}

double variation_index(const UserProfile& u, double demand, double prev_demand, int t) {
    double denom = std::abs(u.d_hi[t] - u.d_lo[t]);
    if (denom <= 0.0) return 0.0;
    return std::min(1.0, std::abs(demand - prev_demand) / denom);
}

int limit_index(const UserProfile& u, double demand, int t) {
    bool at_limit = std::abs(demand - u.d_hi[t]) <= u.epsilon ||
                    std::abs(demand - u.d_lo[t]) <= u.epsilon;
    return at_limit ? 1 : 0;
}

int satisfaction_level(const SatisfactionConfig& cfg, double index_i, double index_v,
                       int index_l) {
    double raw = 10.0 - cfg.omega1 * index_i - cfg.omega2 * index_v -
                 (10.0 - cfg.omega1 - cfg.omega2) * static_cast<double>(index_l);
    int score = static_cast<int>(std::floor(raw + 1e-9));
    return std::clamp(score, 0, 10);
}

double running_average_satisfaction(std::span<const std::vector<int>> scores_by_period,
                                    int t, int n_users) {
    long sum = 0;
    for (int k = 0; k < t; ++k)
        for (int s : scores_by_period[k]) sum += s;
    return running_average_from_sum(sum, t, n_users);
}

UserStepResult user_step(const UserProfile& u, const SatisfactionConfig& cfg,
                         double price, double prev_demand, int t) {
    UserStepResult r;
    r.demand = optimal_demand(u, price, t);
    r.welfare = welfare(u, r.demand, price);
    r.index_i = deviation_index(u, r.demand, t);
    r.index_v = variation_index(u, r.demand, prev_demand, t);
    r.index_l = limit_index(u, r.demand, t);
    r.satisfaction = satisfaction_level(cfg, r.index_i, r.index_v, r.index_l);
    return r;
}

}  // namespace drplab
