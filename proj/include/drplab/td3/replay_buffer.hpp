#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "drplab/util/rng.hpp"

namespace drplab::td3 {

struct Transition {
    std::vector<double> obs;
    std::array<double, 2> action{};
    double reward = 0.0;
    std::vector<double> next_obs;
    bool done = false;
};

// Ring buffer: once full, new transitions overwrite the oldest ones.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

    void store(Transition t);
    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return data_[i]; }

    // `batch` uniform indices over the stored range, with replacement.
    std::vector<std::size_t> sample_indices(int batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> data_;
};

}  // namespace drplab::td3
