#include "drplab/penalty.hpp"

#include <algorithm>
#include <cmath>

namespace drplab {

double linear_penalty(double beta, double c_bound, double c_ave) {
    return beta * std::max(0.0, c_bound - c_ave);
}

double squared_penalty(double beta, double c_bound, double c_ave) {
    double dev = c_bound - c_ave;
    return beta * dev * dev;
}

double combined_penalty(const PenaltyState& st, double c_bound, double c_ave) {
    double dev = c_bound - c_ave;
    return 0.5 * st.beta_lin * std::max(0.0, dev) + 0.5 * st.beta_sqr * dev * dev;
}

PenaltyState update_coefficients(PenaltyState st, double c_bound, double c_ave) {
    double dev = c_bound - c_ave;
    st.beta_lin = std::min(st.cfg.beta_cap, std::max(0.0, st.beta_lin + st.cfg.eta_lin * dev));
    st.beta_sqr = std::min(st.cfg.beta_cap, st.beta_sqr + st.cfg.eta_sqr * std::abs(dev));
    return st;
}

}  // namespace drplab
