#include "trafficrl/control/fixed_time.hpp"

#include <cmath>
#include <stdexcept>

namespace trafficrl::control {

sim::LightPhase fixed_time_phase(double elapsed) {
    if (!(elapsed >= 0.0)) throw std::invalid_argument("elapsed time must be non-negative");
    const double t = std::fmod(elapsed, kFixedCycleSeconds);
    if (t < kFixedGreenSeconds) return sim::LightPhase::Green;
    if (t < kFixedGreenSeconds + kFixedYellowSeconds) return sim::LightPhase::Yellow;
    return sim::LightPhase::Red;
}

sim::PhaseSet FixedTimeController::phases(const sim::World& world) {
    return sim::PhaseSet(world.lights().size(), fixed_time_phase(world.clock()));
}

}  // namespace trafficrl::control
