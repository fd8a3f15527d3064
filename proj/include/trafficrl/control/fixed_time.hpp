#pragma once

#include "trafficrl/control/controller.hpp"
#include "trafficrl/sim/types.hpp"

namespace trafficrl::control {

// Green 5 s, yellow 2 s, red 5 s, repeating every 12 s.
inline constexpr double kFixedGreenSeconds = 5.0;
inline constexpr double kFixedYellowSeconds = 2.0;
inline constexpr double kFixedRedSeconds = 5.0;
inline constexpr double kFixedCycleSeconds = kFixedGreenSeconds + kFixedYellowSeconds + kFixedRedSeconds;

sim::LightPhase fixed_time_phase(double elapsed);

// Every light follows the same schedule, all starting in green at t = 0.
class FixedTimeController final : public Controller {
public:
    sim::PhaseSet phases(const sim::World& world) override;
};

}  // namespace trafficrl::control
