#pragma once

#include <functional>
#include <vector>

#include "drplab/util/rng.hpp"

namespace drplab::approx {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t worst_index = 0;
    int checked = 0;

    bool ok(double tol = 1e-4) const { return max_rel_err < tol; }
};

// Central finite differences against an analytic gradient. `loss` must be a
// pure function of theta (forward passes only). Checks `samples` parameter
// entries drawn without replacement, or every entry when samples covers the
// vector. theta is restored exactly after each probe.
GradCheckResult finite_difference_check(std::vector<double>& theta,
                                        const std::function<double(const double*)>& loss,
                                        const std::vector<double>& analytic, int samples,
                                        Rng& rng, double step = 1e-5);

}  // namespace drplab::approx
