#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trafficrl/random.hpp"

namespace trafficrl::rl {

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

// Contiguous mini-batch: row i of `states` / `next_states` is transition i.
struct TransitionBatch {
    std::size_t size = 0;
    std::size_t state_dim = 0;
    std::vector<double> states;
    std::vector<int> actions;
    std::vector<double> rewards;
    std::vector<double> next_states;
    std::vector<unsigned char> dones;

    void reserve(std::size_t rows, std::size_t dim);
    void push(const Transition& t);
};

/// Fixed-capacity ring of transitions; once full the oldest entry is overwritten.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::size_t state_dim);

    void push(const Transition& t);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t state_dim() const { return state_dim_; }

    // i = 0 is the oldest stored transition.
    Transition at(std::size_t i) const;

    // Uniform sampling with replacement.
    TransitionBatch sample(std::size_t batch, Rng& rng) const;

private:
    void copy_row(std::size_t slot, TransitionBatch& out) const;

    std::size_t capacity_;
    std::size_t state_dim_;
    std::size_t size_ = 0;
    std::size_t head_ = 0;  // next slot to write
    std::vector<double> states_;
    std::vector<double> next_states_;
    std::vector<int> actions_;
    std::vector<double> rewards_;
    std::vector<unsigned char> dones_;
};

}  // namespace trafficrl::rl
