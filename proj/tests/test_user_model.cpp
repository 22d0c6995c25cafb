#include "doctest.h"
#include "drplab/user_model.hpp"
#include "drplab/util/rng.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace drplab;

namespace {

UserProfile profile(double ua, double ub, double lo, double hi, double ideal,
                    double eps = 0.05) {
    UserProfile u;
    u.u_a = ua;
    u.u_b = ub;
    u.epsilon = eps;
    u.d_lo = {lo};
    u.d_hi = {hi};
    u.d_ideal = {ideal};
    return u;
}

// Independent oracle: argmax of the welfare objective on a fine grid.
double grid_argmax(const UserProfile& u, double price, int t, double step = 1e-4) {
    double best_d = u.d_lo[t];
    double best_w = welfare(u, best_d, price);
    for (double d = u.d_lo[t]; d <= u.d_hi[t] + 1e-12; d += step) {
        double w = welfare(u, d, price);
        if (w > best_w) {
            best_w = w;
            best_d = d;
        }
    }
    double w_hi = welfare(u, u.d_hi[t], price);
    if (w_hi > best_w) best_d = u.d_hi[t];
    return best_d;
}

}  // namespace

TEST_CASE("optimal_demand closed form") {
    CHECK(optimal_demand(profile(-1.0, 10.0, 0.0, 10.0, 5.0), 4.0, 0) == doctest::Approx(3.0));
    CHECK(optimal_demand(profile(-1.0, 10.0, 0.0, 10.0, 5.0), 10.0, 0) == doctest::Approx(0.0));
    CHECK(optimal_demand(profile(-0.5, 8.0, 0.0, 4.0, 2.0), 2.0, 0) == doctest::Approx(4.0));
}

TEST_CASE("optimal_demand equals grid argmax on random instances") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        double ua = -rng.uniform(0.1, 2.0);
        double ub = rng.uniform(1.0, 20.0);
        double lo = rng.uniform(0.0, 5.0);
        double hi = lo + rng.uniform(0.5, 10.0);
        double price = rng.uniform(0.05, 25.0);
        UserProfile u = profile(ua, ub, lo, hi, 0.5 * (lo + hi));
        double closed = optimal_demand(u, price, 0);
        double scanned = grid_argmax(u, price, 0);
        CHECK(std::abs(closed - scanned) < 1e-3);
    }
}

TEST_CASE("optimal_demand is nonincreasing in price") {
    UserProfile u = profile(-0.4, 9.0, 1.0, 8.0, 4.0);
    double prev = optimal_demand(u, 0.1, 0);
    for (double price = 0.2; price < 15.0; price += 0.1) {
        double d = optimal_demand(u, price, 0);
        CHECK(d <= prev + 1e-12);
        prev = d;
    }
}

TEST_CASE("welfare formula and maximizer property") {
    UserProfile u = profile(-1.0, 10.0, 0.0, 10.0, 5.0);
    CHECK(welfare(u, 3.0, 4.0) == doctest::Approx(9.0));
    CHECK(welfare(u, 0.0, 4.0) == doctest::Approx(0.0));
    double d_star = optimal_demand(u, 4.0, 0);
    for (double d = 0.0; d <= 10.0; d += 0.25)
        CHECK(welfare(u, d_star, 4.0) >= welfare(u, d, 4.0) - 1e-12);
}

TEST_CASE("deviation index") {
    CHECK(deviation_index(profile(-1, 1, 0, 10, 5), 5.0, 0) == doctest::Approx(0.0));
    CHECK(deviation_index(profile(-1, 1, 0, 10, 5), 10.0, 0) == doctest::Approx(1.0));
    CHECK(deviation_index(profile(-1, 1, 0, 10, 8), 4.0, 0) == doctest::Approx(0.5));
    // degenerate bounds read as no deviation
    CHECK(deviation_index(profile(-1, 1, 5, 5, 5), 5.0, 0) == doctest::Approx(0.0));
}

TEST_CASE("variation index") {
    UserProfile u = profile(-1, 1, 0, 10, 5);
    CHECK(variation_index(u, 4.0, 4.0, 0) == doctest::Approx(0.0));
    CHECK(variation_index(u, 7.0, 3.0, 0) == doctest::Approx(0.4));
    CHECK(variation_index(u, 10.0, 0.0, 0) == doctest::Approx(1.0));
    CHECK(variation_index(profile(-1, 1, 5, 5, 5), 5.0, 4.0, 0) == doctest::Approx(0.0));
}

TEST_CASE("limit index") {
    UserProfile u = profile(-1, 1, 0, 10, 5);
    CHECK(limit_index(u, 10.0, 0) == 1);
    CHECK(limit_index(u, 5.0, 0) == 0);
    CHECK(limit_index(u, 9.96, 0) == 1);
    CHECK(limit_index(u, 0.04, 0) == 1);
    CHECK(limit_index(u, 0.06, 0) == 0);
}

TEST_CASE("satisfaction level quantization") {
    SatisfactionConfig cfg;  // omega1=4, omega2=3
    CHECK(satisfaction_level(cfg, 0, 0, 0) == 10);
    CHECK(satisfaction_level(cfg, 0.5, 0.2, 0) == 7);  // floor(7.4)
    CHECK(satisfaction_level(cfg, 1, 1, 1) == 0);
    // exact integers stay put under the nudge
    CHECK(satisfaction_level(cfg, 0.25, 0.0, 0) == 9);  // 10 - 1.0 exactly
}

TEST_CASE("running average satisfaction") {
    std::vector<std::vector<int>> h1 = {{8, 6}};
    CHECK(running_average_satisfaction(h1, 1, 2) == doctest::Approx(7.0));
    std::vector<std::vector<int>> h2 = {{8, 6}, {7, 9}};
    CHECK(running_average_satisfaction(h2, 2, 2) == doctest::Approx(7.5));
    std::vector<std::vector<int>> h3 = {{5, 5}, {5, 5}, {5, 5}};
    CHECK(running_average_satisfaction(h3, 3, 2) == doctest::Approx(5.0));
}

TEST_CASE("running average is bounded by period means") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int periods = 1 + static_cast<int>(rng.below(6));
        int users = 1 + static_cast<int>(rng.below(4));
        std::vector<std::vector<int>> h(periods, std::vector<int>(users));
        double lo = 10.0, hi = 0.0;
        for (auto& period : h) {
            double sum = 0;
            for (int& score : period) {
                score = static_cast<int>(rng.below(11));
                sum += score;
            }
            lo = std::min(lo, sum / users);
            hi = std::max(hi, sum / users);
        }
        double avg = running_average_satisfaction(h, periods, users);
        CHECK(avg >= lo - 1e-12);
        CHECK(avg <= hi + 1e-12);
    }
}

TEST_CASE("indices and scores stay in range for random demands") {
    Rng rng(17);
    for (int trial = 0; trial < 2000; ++trial) {
        double lo = rng.uniform(0.0, 5.0);
        double hi = lo + rng.uniform(0.0, 8.0);
        double ideal = rng.uniform(lo, hi);
        UserProfile u = profile(-1.0, 5.0, lo, hi, ideal, rng.uniform(0.0, 0.2));
        SatisfactionConfig cfg;
        cfg.omega1 = rng.uniform(0.0, 6.0);
        cfg.omega2 = rng.uniform(0.0, 10.0 - cfg.omega1);
        double d = rng.uniform(lo, hi);
        double d_prev = rng.uniform(lo, hi);
        double I = deviation_index(u, d, 0);
        double V = variation_index(u, d, d_prev, 0);
        int L = limit_index(u, d, 0);
        CHECK(I >= 0.0);
        CHECK(I <= 1.0);
        CHECK(V >= 0.0);
        CHECK(V <= 1.0);
        CHECK((L == 0 || L == 1));
        int c = satisfaction_level(cfg, I, V, L);
        CHECK(c >= 0);
        CHECK(c <= 10);
    }
}
