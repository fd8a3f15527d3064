#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "trafficrl/control/constraints.hpp"
#include "trafficrl/control/controller.hpp"
#include "trafficrl/rl/dqn.hpp"
#include "trafficrl/sim/world.hpp"

namespace trafficrl::rl {

struct ControlTiming {
    int decision_frames = 6;  // 0.1 s at 60 fps
    double t_min = 1.0;
    double t_max = 10.0;

    double interval(int fps) const { return static_cast<double>(decision_frames) / fps; }
};

struct TrainOptions {
    sim::SimConfig sim;
    Hyperparams hp;
    ControlTiming timing;
    int episodes = 20;
    std::uint64_t seed = 0;
};

struct EpisodeLog {
    int episode = 0;
    double mean_reward = 0.0;  // per-agent episode return, averaged over agents
    double mean_loss = 0.0;    // over every update in the episode; 0 when none happened
    double epsilon = 0.0;      // mean over agents at episode end
    long updates = 0;
    sim::RunMetrics metrics;
};

struct TrainingResult {
    std::vector<AgentState> agents;
    std::vector<EpisodeLog> log;
    long constraint_violations = 0;
    long decision_ticks = 0;
};

using WorldFactory = std::function<sim::World(std::uint64_t seed)>;
using EpisodeCallback = std::function<void(const EpisodeLog&)>;

// World seed used for training episode `episode` (0-based).
inline std::uint64_t training_world_seed(std::uint64_t seed, int episode) {
    return seed + static_cast<std::uint64_t>(episode);
}

/// Multi-agent DQN training, one agent per light. Every decision tick all
/// agents act on the same observed global state; after the world advances,
/// each agent in light order stores its transition and takes one update.
TrainingResult train(const WorldFactory& make_world, const TrainOptions& options,
                     const EpisodeCallback& on_episode = nullptr);

std::vector<sim::LightPhase> actions_to_phases(std::span<const int> actions);

/// Greedy evaluation policy with hold constraints enforced.
class MarlController final : public control::Controller {
public:
    MarlController(const std::vector<QNetwork>& networks, ControlTiming timing, int fps);

    sim::PhaseSet phases(const sim::World& world) override;

    const control::ConstraintAudit& audit() const { return audit_; }

private:
    const std::vector<QNetwork>& networks_;
    ControlTiming timing_;
    control::ConstraintState constraints_;
    control::ConstraintAudit audit_;
    std::vector<int> actions_;
};

}  // namespace trafficrl::rl
