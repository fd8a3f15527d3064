#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trafficrl/random.hpp"
#include "trafficrl/sim/config.hpp"
#include "trafficrl/sim/types.hpp"

namespace trafficrl::sim {

// Nearest light ahead of the vehicle on its lane that it has not crossed yet.
std::optional<int> governing_light(const Vehicle& vehicle, std::span<const TrafficLight> lights,
                                   const SimConfig& config);

class World;

// Whether `vehicle` may advance this frame given the world's current phases
// and the vehicle directly ahead of it on the same lane.
bool can_move(const Vehicle& vehicle, const World& world);

/// Fixed-step world model. Single-threaded; distinct worlds are independent.
///
/// Each frame: phases are applied, the spawner fires if due, vehicles advance
/// front-to-back per lane, crossings and exits are recorded, then the clock
/// advances. The only randomness is the spawn point choice, drawn from a
/// generator seeded at construction.
class World {
public:
    World(SimConfig config, std::uint64_t seed);

    const SimConfig& config() const { return config_; }
    std::int64_t frame() const { return frame_; }
    double clock() const { return static_cast<double>(frame_) / config_.fps; }
    bool finished() const { return frame_ >= total_frames_; }

    const std::vector<Vehicle>& vehicles() const { return vehicles_; }
    const std::vector<TrafficLight>& lights() const { return lights_; }
    std::int64_t spawned() const { return spawned_; }
    std::int64_t exited() const { return exited_; }

    /// Sets every light's phase; time in phase restarts for lights that change.
    void apply_phases(std::span<const LightPhase> phases);

    /// Spawns one vehicle if the spawn clock is due at the current frame.
    /// Returns true when a vehicle was added.
    bool spawn_tick();

    /// Spawns at a uniformly drawn spawn point regardless of the spawn clock.
    const Vehicle& spawn_vehicle();

    /// Places a vehicle directly (scenario setup). Counts as spawned.
    const Vehicle& add_vehicle(Vec2 pos, Direction dir, bool moving = false);

    FrameEvents step(std::span<const LightPhase> phases);

    /// Seconds spent stopped, summed over every vehicle spawned so far.
    double total_wait() const;

    /// Throws StateError unless the run has reached its duration.
    RunMetrics finalize() const;

    double seconds(std::int64_t frames) const { return static_cast<double>(frames) / config_.fps; }

private:
    bool blocked(const Vehicle& v, const Vehicle* leader) const;

    SimConfig config_;
    std::int64_t total_frames_ = 0;
    Rng rng_;
    std::int64_t frame_ = 0;
    std::int64_t spawned_ = 0;
    std::int64_t spawned_timer_ = 0;  // spawns fired by the spawn clock
    std::int64_t exited_ = 0;
    std::int64_t exited_stopped_frames_ = 0;
    std::uint64_t next_id_ = 0;
    std::vector<Vehicle> vehicles_;
    std::vector<TrafficLight> lights_;

    friend bool can_move(const Vehicle& vehicle, const World& world);
};

}  // namespace trafficrl::sim
