#include "drplab/approx/bundle.hpp"

#include <algorithm>
#include <cmath>

#include "drplab/util/errors.hpp"

namespace drplab::approx {

std::size_t Bundle::add(const std::string& name, int rows, int cols) {
    ArrayView view;
    view.name = name;
    view.offset = value.size();
    view.size = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    view.rows = rows;
    view.cols = cols;
    views_.push_back(view);
    value.resize(value.size() + view.size, 0.0);
    grad.resize(value.size(), 0.0);
    m.resize(value.size(), 0.0);
    v.resize(value.size(), 0.0);
    return view.offset;
}

const ArrayView* Bundle::find(const std::string& name) const {
    for (const auto& view : views_)
        if (view.name == name) return &view;
    return nullptr;
}

void Bundle::zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

void adam_step(Bundle& b, const AdamConfig& cfg) {
    b.adam_step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(b.adam_step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(b.adam_step));
    for (std::size_t i = 0; i < b.value.size(); ++i) {
        double g = b.grad[i];
        b.m[i] = cfg.beta1 * b.m[i] + (1.0 - cfg.beta1) * g;
        b.v[i] = cfg.beta2 * b.v[i] + (1.0 - cfg.beta2) * g * g;
        double m_hat = b.m[i] / bc1;
        double v_hat = b.v[i] / bc2;
        b.value[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
}

void soft_update(Bundle& target, const Bundle& online, double tau) {
    if (target.value.size() != online.value.size())
        throw ValidationError("soft_update: bundle shapes differ");
    for (std::size_t i = 0; i < target.value.size(); ++i)
        target.value[i] = tau * online.value[i] + (1.0 - tau) * target.value[i];
}

}  // namespace drplab::approx
