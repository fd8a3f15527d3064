#include "trafficrl/rl/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace trafficrl::rl {

void TransitionBatch::reserve(std::size_t rows, std::size_t dim) {
    state_dim = dim;
    states.reserve(rows * dim);
    next_states.reserve(rows * dim);
    actions.reserve(rows);
    rewards.reserve(rows);
    dones.reserve(rows);
}

void TransitionBatch::push(const Transition& t) {
    if (size == 0 && state_dim == 0) state_dim = t.state.size();
    if (t.state.size() != state_dim || t.next_state.size() != state_dim) {
        throw std::invalid_argument("transition state size mismatch");
    }
    states.insert(states.end(), t.state.begin(), t.state.end());
    next_states.insert(next_states.end(), t.next_state.begin(), t.next_state.end());
    actions.push_back(t.action);
    rewards.push_back(t.reward);
    dones.push_back(t.done ? 1 : 0);
    ++size;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim)
    : capacity_(capacity), state_dim_(state_dim) {
    if (capacity == 0 || state_dim == 0) throw std::invalid_argument("replay buffer needs positive sizes");
    states_.resize(capacity * state_dim);
    next_states_.resize(capacity * state_dim);
    actions_.resize(capacity);
    rewards_.resize(capacity);
    dones_.resize(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_) {
        throw std::invalid_argument("transition state size does not match buffer");
    }
    std::copy(t.state.begin(), t.state.end(), states_.begin() + static_cast<std::ptrdiff_t>(head_ * state_dim_));
    std::copy(t.next_state.begin(), t.next_state.end(),
              next_states_.begin() + static_cast<std::ptrdiff_t>(head_ * state_dim_));
    actions_[head_] = t.action;
    rewards_[head_] = t.reward;
    dones_[head_] = t.done ? 1 : 0;
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

Transition ReplayBuffer::at(std::size_t i) const {
    if (i >= size_) throw std::out_of_range("replay index out of range");
    const std::size_t slot = (head_ + capacity_ - size_ + i) % capacity_;
    const auto s0 = states_.begin() + static_cast<std::ptrdiff_t>(slot * state_dim_);
    const auto n0 = next_states_.begin() + static_cast<std::ptrdiff_t>(slot * state_dim_);
    return Transition{{s0, s0 + static_cast<std::ptrdiff_t>(state_dim_)},
                      actions_[slot],
                      rewards_[slot],
                      {n0, n0 + static_cast<std::ptrdiff_t>(state_dim_)},
                      dones_[slot] != 0};
}

void ReplayBuffer::copy_row(std::size_t slot, TransitionBatch& out) const {
    const auto off = static_cast<std::ptrdiff_t>(slot * state_dim_);
    const auto len = static_cast<std::ptrdiff_t>(state_dim_);
    out.states.insert(out.states.end(), states_.begin() + off, states_.begin() + off + len);
    out.next_states.insert(out.next_states.end(), next_states_.begin() + off, next_states_.begin() + off + len);
    out.actions.push_back(actions_[slot]);
    out.rewards.push_back(rewards_[slot]);
    out.dones.push_back(dones_[slot]);
    ++out.size;
}

TransitionBatch ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (size_ == 0) throw std::logic_error("cannot sample from an empty replay buffer");
    TransitionBatch out;
    out.reserve(batch, state_dim_);
    for (std::size_t i = 0; i < batch; ++i) {
        // Any stored slot is equally likely; slot order is irrelevant for uniform draws.
        copy_row(static_cast<std::size_t>(rng.uniform_index(size_)), out);
    }
    return out;
}

}  // namespace trafficrl::rl
