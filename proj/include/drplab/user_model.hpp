#pragma once

#include <span>

#include "drplab/scenario.hpp"

namespace drplab {

// Outcome of one user's response to a posted price in one period.
struct UserStepResult {
    double demand = 0.0;   // chosen consumption, kW
    double welfare = 0.0;  // U(d) - lambda * d, currency
    int satisfaction = 0;  // quantized score, 0..10
    double index_i = 0.0;  // ideal-demand deviation, [0, 1]
    double index_v = 0.0;  // consumption variation, [0, 1]
    int index_l = 0;       // at-limit indicator, {0, 1}
};

// Closed-form maximizer of u_a d^2 + u_b d - lambda d over [d_lo[t], d_hi[t]]:
// the stationary point (lambda - u_b) / (2 u_a) clipped into the bounds.
double optimal_demand(const UserProfile& u, double price, int t);

double welfare(const UserProfile& u, double demand, double price);

// |d - d_ideal| / max(d_hi - d_ideal, d_ideal - d_lo); 0 on degenerate bounds.
double deviation_index(const UserProfile& u, double demand, int t);

// |d_t - d_prev| / (d_hi - d_lo); 0 when d_hi == d_lo.
double variation_index(const UserProfile& u, double demand, double prev_demand, int t);

// 1 when the demand sits within epsilon of either bound.
int limit_index(const UserProfile& u, double demand, int t);

// floor(10 - w1*I - w2*V - (10-w1-w2)*L), nudged up by 1e-9 before flooring
// so an exact integer never lands on the wrong side. Result is in {0,...,10}.
int satisfaction_level(const SatisfactionConfig& cfg, double index_i, double index_v, int index_l);

// Cumulative within-episode mean over periods 1..t: scores_by_period holds one
// inner vector of n_users scores per elapsed period.
double running_average_satisfaction(std::span<const std::vector<int>> scores_by_period,
                                    int t, int n_users);

// Same mean from a pre-accumulated score sum; the environment's fast path.
inline double running_average_from_sum(long sat_sum, int t, int n_users) {
    return static_cast<double>(sat_sum) / (static_cast<double>(n_users) * static_cast<double>(t));
}

// Full per-period response: demand, welfare, indices, quantized score.
UserStepResult user_step(const UserProfile& u, const SatisfactionConfig& cfg,
                         double price, double prev_demand, int t);

}  // namespace drplab
