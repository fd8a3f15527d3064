#include "trafficrl/rl/dqn.hpp"

#include <algorithm>
#include <stdexcept>

namespace trafficrl::rl {

void Hyperparams::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (batch == 0 || batch > buffer_capacity) throw std::invalid_argument("need 0 < batch <= buffer_capacity");
    if (target_sync_every <= 0) throw std::invalid_argument("target_sync_every must be positive");
    if (!(eps_min > 0.0 && eps_min <= eps0 && eps0 <= 1.0)) {
        throw std::invalid_argument("need 0 < eps_min <= eps0 <= 1");
    }
    if (!(eps_decay >= 0.0)) throw std::invalid_argument("eps_decay must be non-negative");
    if (hidden.empty()) throw std::invalid_argument("at least one hidden layer required");
}

AgentState AgentState::create(std::size_t input_dim, std::size_t action_count, const Hyperparams& hp, Rng& rng) {
    std::vector<std::size_t> dims{input_dim};
    dims.insert(dims.end(), hp.hidden.begin(), hp.hidden.end());
    dims.push_back(action_count);
    QNetwork online = QNetwork::glorot_uniform(dims, rng);
    Adam adam(online, Adam::Options{hp.lr});
    return AgentState{online, online, std::move(adam), ReplayBuffer(hp.buffer_capacity, input_dim), hp.eps0, 0};
}

std::vector<double> td_targets(const TransitionBatch& batch, const QNetwork& target_net, double gamma) {
    if (batch.size == 0) throw std::invalid_argument("empty batch");
    std::vector<double> q_next;
    target_net.forward_batch(batch.next_states, batch.size, q_next);
    const std::size_t n_out = target_net.output_size();
    std::vector<double> y(batch.size);
    for (std::size_t i = 0; i < batch.size; ++i) {
        y[i] = batch.rewards[i];
        if (batch.dones[i] == 0) {
            const auto row = std::span<const double>(q_next).subspan(i * n_out, n_out);
            y[i] += gamma * *std::max_element(row.begin(), row.end());
        }
    }
    return y;
}

double train_on_batch(AgentState& agent, const TransitionBatch& batch, const Hyperparams& hp) {
    const auto y = td_targets(batch, agent.target, hp.gamma);
    Gradients grad;
    const double loss = masked_mse_loss(agent.online, batch.states, batch.actions, y, &grad);
    agent.optimizer.step(agent.online, grad);
    ++agent.update_steps;
    return loss;
}

std::optional<double> train_step(AgentState& agent, const Hyperparams& hp, Rng& rng) {
    if (agent.buffer.size() < hp.batch) return std::nullopt;
    const auto batch = agent.buffer.sample(hp.batch, rng);
    return train_on_batch(agent, batch, hp);
}

int argmax(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("argmax of empty range");
    int best = 0;
    for (int a = 1; a < static_cast<int>(values.size()); ++a) {
        if (values[a] > values[best]) best = a;
    }
    return best;
}

int epsilon_greedy(std::span<const double> q_values, double eps, Rng& rng) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (eps > 0.0 && rng.uniform01() < eps) {
        return static_cast<int>(rng.uniform_index(q_values.size()));
    }
    return argmax(q_values);
}

double epsilon_step(double eps, const Hyperparams& hp) {
    const double next = eps - hp.eps_decay;
    // Repeated subtraction drifts by ~1e-13 per thousand steps; snap onto the floor.
    return next <= hp.eps_min + kEpsilonSnap ? hp.eps_min : next;
}

double epsilon_after(long update_steps, const Hyperparams& hp) {
    return std::max(hp.eps0 - static_cast<double>(update_steps) * hp.eps_decay, hp.eps_min);
}

void sync_target(AgentState& agent) { agent.target = agent.online; }

}  // namespace trafficrl::rl
