#include "trafficrl/control/controller.hpp"

namespace trafficrl::control {

sim::RunMetrics run_episode(sim::World& world, Controller& controller, const FrameObserver& observer) {
    while (!world.finished()) {
        const auto phases = controller.phases(world);
        const auto events = world.step(phases);
        if (observer) observer(world, events);
    }
    return world.finalize();
}

}  // namespace trafficrl::control
