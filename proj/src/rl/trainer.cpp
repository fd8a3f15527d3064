#include "trafficrl/rl/trainer.hpp"

#include <stdexcept>

#include "trafficrl/control/features.hpp"
#include "trafficrl/control/reward.hpp"

namespace trafficrl::rl {

namespace {

constexpr int kInitialAction = 0;  // lights start green

}  // namespace

std::vector<sim::LightPhase> actions_to_phases(std::span<const int> actions) {
    std::vector<sim::LightPhase> phases;
    phases.reserve(actions.size());
    for (int a : actions) {
        if (a < 0 || a >= control::kActionCount) throw std::invalid_argument("action out of range");
        phases.push_back(static_cast<sim::LightPhase>(a));
    }
    return phases;
}

TrainingResult train(const WorldFactory& make_world, const TrainOptions& options,
                     const EpisodeCallback& on_episode) {
    if (options.episodes < 1) throw std::invalid_argument("episodes must be >= 1");
    if (options.timing.decision_frames < 1) throw std::invalid_argument("decision_frames must be >= 1");
    const auto& hp = options.hp;
    hp.validate();

    Rng rng(options.seed ^ 0x9E3779B97F4A7C15ULL);
    TrainingResult result;

    for (int episode = 0; episode < options.episodes; ++episode) {
        sim::World world = make_world(training_world_seed(options.seed, episode));
        const std::size_t n = world.lights().size();
        const std::size_t dim = control::feature_size(n);
        const double interval = options.timing.interval(world.config().fps);

        if (result.agents.empty()) {
            for (std::size_t i = 0; i < n; ++i) {
                result.agents.push_back(AgentState::create(dim, control::kActionCount, hp, rng));
            }
        } else if (result.agents.size() != n) {
            throw std::invalid_argument("world factory changed the light count between episodes");
        }

        auto constraints = control::ConstraintState::initial(n, kInitialAction, options.timing.t_min,
                                                             options.timing.t_max, interval);
        control::ConstraintAudit audit(n, kInitialAction, options.timing.t_min, options.timing.t_max, interval);
        control::MovedCounter moved(n);
        std::vector<int> actions(n, kInitialAction);
        std::vector<double> returns(n, 0.0);
        double loss_sum = 0.0;
        long updates = 0;

        auto state = control::featurize(world);
        while (!world.finished()) {
            for (std::size_t i = 0; i < n; ++i) {
                auto& agent = result.agents[i];
                const auto q = agent.online.forward(state);
                const int proposed = epsilon_greedy(q, agent.epsilon, rng);
                actions[i] = control::apply_constraints(proposed, q, constraints, static_cast<int>(i));
            }
            audit.record(actions);
            const auto phases = actions_to_phases(actions);

            moved.reset();
            for (int f = 0; f < options.timing.decision_frames && !world.finished(); ++f) {
                moved.add(world.step(phases));
            }
            auto next_state = control::featurize(world);
            const bool done = world.finished();

            for (std::size_t i = 0; i < n; ++i) {
                auto& agent = result.agents[i];
                const auto terms = control::compute_reward(moved.moved(static_cast<int>(i)), world, static_cast<int>(i));
                returns[i] += terms.reward;
                agent.buffer.push(Transition{state, actions[i], terms.reward, next_state, done});
                if (const auto loss = train_step(agent, hp, rng)) {
                    loss_sum += *loss;
                    ++updates;
                    agent.epsilon = epsilon_after(agent.update_steps, hp);
                    if (agent.update_steps % hp.target_sync_every == 0) sync_target(agent);
                }
            }
            state = std::move(next_state);
        }

        EpisodeLog entry;
        entry.episode = episode;
        for (std::size_t i = 0; i < n; ++i) {
            entry.mean_reward += returns[i] / static_cast<double>(n);
            entry.epsilon += result.agents[i].epsilon / static_cast<double>(n);
        }
        entry.updates = updates;
        entry.mean_loss = updates > 0 ? loss_sum / static_cast<double>(updates) : 0.0;
        entry.metrics = world.finalize();
        result.constraint_violations += audit.violations();
        result.decision_ticks += audit.ticks();
        result.log.push_back(entry);
        if (on_episode) on_episode(entry);
    }
    return result;
}

MarlController::MarlController(const std::vector<QNetwork>& networks, ControlTiming timing, int fps)
    : networks_(networks),
      timing_(timing),
      constraints_(control::ConstraintState::initial(networks.size(), kInitialAction, timing.t_min, timing.t_max,
                                                     timing.interval(fps))),
      audit_(networks.size(), kInitialAction, timing.t_min, timing.t_max, timing.interval(fps)),
      actions_(networks.size(), kInitialAction) {
    if (timing.decision_frames < 1) throw std::invalid_argument("decision_frames must be >= 1");
}

sim::PhaseSet MarlController::phases(const sim::World& world) {
    if (world.lights().size() != networks_.size()) {
        throw std::invalid_argument("model has " + std::to_string(networks_.size()) + " agents but world has " +
                                    std::to_string(world.lights().size()) + " lights");
    }
    if (world.frame() % timing_.decision_frames == 0) {
        const auto state = control::featurize(world);
        for (std::size_t i = 0; i < networks_.size(); ++i) {
            const auto q = networks_[i].forward(state);
            actions_[i] = control::apply_constraints(argmax(q), q, constraints_, static_cast<int>(i));
        }
        audit_.record(actions_);
    }
    return actions_to_phases(actions_);
}

}  // namespace trafficrl::rl
