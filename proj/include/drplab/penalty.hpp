#pragma once

#include "drplab/scenario.hpp"

namespace drplab {

// Dynamic penalty coefficients, dual-ascent style: each step's penalty is
// charged with the current coefficients, then the coefficients move.
struct PenaltyState {
    double beta_lin = 0.0;
    double beta_sqr = 0.0;
    PenaltyConfig cfg;

    static PenaltyState initial(const PenaltyConfig& cfg) {
        return PenaltyState{cfg.beta_lin0, cfg.beta_sqr0, cfg};
    }
};

// Traditional fixed-coefficient penalties.
double linear_penalty(double beta, double c_bound, double c_ave);
double squared_penalty(double beta, double c_bound, double c_ave);

// 1/2 beta_lin max(0, Cb - Cave) + 1/2 beta_sqr (Cb - Cave)^2, evaluated with
// the coefficients currently in `st` (before any update).
double combined_penalty(const PenaltyState& st, double c_bound, double c_ave);

// beta_lin' = clamp(beta_lin + eta_lin (Cb - Cave), 0, cap);
// beta_sqr' = min(cap, beta_sqr + eta_sqr |Cb - Cave|).
PenaltyState update_coefficients(PenaltyState st, double c_bound, double c_ave);

}  // namespace drplab
