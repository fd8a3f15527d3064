#pragma once

#include <cstdint>
#include <vector>

#include "trafficrl/sim/types.hpp"

namespace trafficrl::sim {

struct SpawnPoint {
    Vec2 pos;
    Direction dir = Direction::Right;
};

/// Geometry and timing of the four-light grid. Distances are pixels, times seconds.
///
/// Lanes sit 20 px either side of the light axes: eastbound traffic runs at
/// y = 280/580, westbound at y = 320/620, southbound at x = 320/620 and
/// northbound at x = 280/580.
struct SimConfig {
    double arena_width = 900.0;
    double arena_height = 900.0;
    std::vector<Vec2> light_positions{{300, 300}, {600, 300}, {300, 600}, {600, 600}};
    std::vector<SpawnPoint> spawn_points{
        {{0, 280}, Direction::Right},  {{0, 580}, Direction::Right},
        {{900, 320}, Direction::Left}, {{900, 620}, Direction::Left},
        {{320, 0}, Direction::Down},   {{620, 0}, Direction::Down},
        {{280, 900}, Direction::Up},   {{580, 900}, Direction::Up},
    };
    double spawn_interval = 0.5;
    bool spawning = true;
    int fps = 60;
    double duration = 600.0;

    double vehicle_speed = 120.0;
    double vehicle_length = 20.0;
    double stop_line_offset = 30.0;
    double min_gap = 15.0;
    double detection_radius = 150.0;
    double governing_band = 40.0;

    /// Throws ConfigError when any invariant is broken.
    void validate() const;

    std::int64_t total_frames() const;
    double step_distance() const { return vehicle_speed / fps; }
    int light_count() const { return static_cast<int>(light_positions.size()); }
};

}  // namespace trafficrl::sim
