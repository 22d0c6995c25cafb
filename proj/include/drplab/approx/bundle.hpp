#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace drplab::approx {

struct ArrayView {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
    int rows = 0;
    int cols = 0;  // 1 for vectors
};

// All parameters of one network in a single flat value vector, with named
// views, a matching gradient accumulator, and first/second moment arrays for
// the optimizer. Gradients for a batch are accumulated outside (one slot per
// sample) and reduced into `grad` in sample order, so results do not depend
// on thread count.
class Bundle {
public:
    std::size_t add(const std::string& name, int rows, int cols);

    std::size_t size() const { return value.size(); }
    const std::vector<ArrayView>& views() const { return views_; }
    const ArrayView* find(const std::string& name) const;

    void zero_grad();

    std::vector<double> value;
    std::vector<double> grad;
    std::vector<double> m;
    std::vector<double> v;
    long adam_step = 0;

private:
    std::vector<ArrayView> views_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected adaptive-moment update consuming bundle.grad.
void adam_step(Bundle& b, const AdamConfig& cfg);

// target <- tau * online + (1 - tau) * target, values only.
void soft_update(Bundle& target, const Bundle& online, double tau);

}  // namespace drplab::approx
