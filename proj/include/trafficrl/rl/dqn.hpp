#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "trafficrl/random.hpp"
#include "trafficrl/rl/network.hpp"
#include "trafficrl/rl/replay_buffer.hpp"

namespace trafficrl::rl {

struct Hyperparams {
    double gamma = 0.99;
    double lr = 1e-3;
    std::size_t batch = 64;
    std::size_t buffer_capacity = 10000;
    long target_sync_every = 100;
    double eps0 = 1.0;
    double eps_min = 0.05;
    double eps_decay = 1e-4;  // subtracted once per update step
    std::vector<std::size_t> hidden{128, 64};

    void validate() const;
};

struct AgentState {
    QNetwork online;
    QNetwork target;
    Adam optimizer;
    ReplayBuffer buffer;
    double epsilon = 1.0;
    long update_steps = 0;

    // Online and target start identical; Adam moments zero.
    static AgentState create(std::size_t input_dim, std::size_t action_count, const Hyperparams& hp, Rng& rng);
};

// y_i = r_i + gamma * max_a' Q(s'_i, a'; target), bootstrap dropped on terminal transitions.
std::vector<double> td_targets(const TransitionBatch& batch, const QNetwork& target_net, double gamma);

// One DQN gradient step on a uniformly sampled mini-batch. Returns the loss
// before the update, or nullopt (nothing done) while the buffer holds fewer
// than `hp.batch` transitions.
std::optional<double> train_step(AgentState& agent, const Hyperparams& hp, Rng& rng);

// Same update on a caller-supplied batch.
double train_on_batch(AgentState& agent, const TransitionBatch& batch, const Hyperparams& hp);

// Lowest index wins ties.
int argmax(std::span<const double> values);

int epsilon_greedy(std::span<const double> q_values, double eps, Rng& rng);

inline constexpr double kEpsilonSnap = 1e-9;

// max(eps - decay, eps_min)
double epsilon_step(double eps, const Hyperparams& hp);

// Closed form of the schedule after `update_steps` updates: max(eps0 - u * decay, eps_min).
double epsilon_after(long update_steps, const Hyperparams& hp);

// theta_target <- theta_online; optimizer state is untouched.
void sync_target(AgentState& agent);

}  // namespace trafficrl::rl
