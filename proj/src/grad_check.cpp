#include "drplab/approx/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace drplab::approx {

GradCheckResult finite_difference_check(std::vector<double>& theta,
                                        const std::function<double(const double*)>& loss,
                                        const std::vector<double>& analytic, int samples,
                                        Rng& rng, double step) {
    std::vector<std::size_t> idx(theta.size());
    std::iota(idx.begin(), idx.end(), 0);
    if (samples < static_cast<int>(theta.size())) {
        // partial Fisher-Yates, first `samples` entries
        for (int i = 0; i < samples; ++i) {
            std::size_t j = i + rng.below(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(samples);
    }

    GradCheckResult res;
    for (std::size_t k : idx) {
        double saved = theta[k];
        theta[k] = saved + step;
        double up = loss(theta.data());
        theta[k] = saved - step;
        double down = loss(theta.data());
        theta[k] = saved;
        double fd = (up - down) / (2.0 * step);
        double a = analytic[k];
        double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-8});
        if (rel > res.max_rel_err) {
            res.max_rel_err = rel;
            res.worst_index = k;
        }
        ++res.checked;
    }
    return res;
}

}  // namespace drplab::approx
