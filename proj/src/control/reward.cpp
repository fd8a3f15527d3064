#include "trafficrl/control/reward.hpp"

#include <algorithm>
#include <stdexcept>

#include "trafficrl/control/features.hpp"

namespace trafficrl::control {

RewardTerms reward_terms(std::int64_t moved, std::int64_t queue, std::int64_t stopped) {
    if (moved < 0 || queue < 0 || stopped < 0 || stopped > queue) {
        throw std::invalid_argument("reward terms require 0 <= stopped <= queue and moved >= 0");
    }
    RewardTerms terms{moved, queue, stopped, 0.0};
    terms.reward = static_cast<double>(moved) - kQueuePenalty * static_cast<double>(queue) -
                   kStoppedPenalty * static_cast<double>(stopped);
    return terms;
}

void MovedCounter::add(const sim::FrameEvents& events) {
    for (std::size_t i = 0; i < moved_.size() && i < events.moved_on_permitted_axis.size(); ++i) {
        moved_[i] += events.moved_on_permitted_axis[i];
    }
}

RewardTerms compute_reward(std::int64_t moved, const sim::World& world, int light) {
    const auto near = approaching_vehicles(world.vehicles(), world.lights(), light, world.config());
    const auto stopped = std::count_if(near.begin(), near.end(), [](const sim::Vehicle* v) { return !v->moving; });
    return reward_terms(moved, static_cast<std::int64_t>(near.size()), static_cast<std::int64_t>(stopped));
}

}  // namespace trafficrl::control
