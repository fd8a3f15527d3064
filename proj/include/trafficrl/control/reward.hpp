#pragma once

#include <cstdint>
#include <vector>

#include "trafficrl/sim/world.hpp"

namespace trafficrl::control {

struct RewardTerms {
    std::int64_t moved = 0;
    std::int64_t queue = 0;
    std::int64_t stopped = 0;
    double reward = 0.0;
};

inline constexpr double kQueuePenalty = 0.1;
inline constexpr double kStoppedPenalty = 0.2;

// r = moved - 0.1 * queue - 0.2 * stopped
RewardTerms reward_terms(std::int64_t moved, std::int64_t queue, std::int64_t stopped);

// Per-light count of permitted-axis crossings summed over a decision interval.
class MovedCounter {
public:
    explicit MovedCounter(std::size_t light_count) : moved_(light_count, 0) {}
    void add(const sim::FrameEvents& events);
    void reset() { std::fill(moved_.begin(), moved_.end(), 0); }
    std::int64_t moved(int light) const { return moved_.at(static_cast<std::size_t>(light)); }

private:
    std::vector<std::int64_t> moved_;
};

// `moved` comes from the interval just ended; queue and stopped are read from
// the world at decision time (governed vehicles inside the detection radius).
RewardTerms compute_reward(std::int64_t moved, const sim::World& world, int light);

}  // namespace trafficrl::control
