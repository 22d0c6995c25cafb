#include "drplab/td3/replay_buffer.hpp"

#include "drplab/util/errors.hpp"

namespace drplab::td3 {

void ReplayBuffer::store(Transition t) {
    if (data_.size() < capacity_) {
        data_.push_back(std::move(t));
    } else {
        data_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(int batch, Rng& rng) const {
    if (data_.empty()) throw GuardError("replay buffer: sampling from an empty buffer");
    std::vector<std::size_t> idx(batch);
    for (int i = 0; i < batch; ++i) idx[i] = rng.below(data_.size());
    return idx;
}

}  // namespace drplab::td3
