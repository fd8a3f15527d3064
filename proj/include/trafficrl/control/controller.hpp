#pragma once

#include <functional>

#include "trafficrl/sim/types.hpp"
#include "trafficrl/sim/world.hpp"

namespace trafficrl::control {

// Supplies the light phases for the next frame.
class Controller {
public:
    virtual ~Controller() = default;
    virtual sim::PhaseSet phases(const sim::World& world) = 0;
};

using FrameObserver = std::function<void(const sim::World&, const sim::FrameEvents&)>;

// Drives `world` to the end of its duration under `controller`.
sim::RunMetrics run_episode(sim::World& world, Controller& controller,
                            const FrameObserver& observer = nullptr);

}  // namespace trafficrl::control
