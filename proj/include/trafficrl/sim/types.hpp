#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace trafficrl::sim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

enum class Direction : std::uint8_t { Right, Left, Down, Up };
enum class Axis : std::uint8_t { Horizontal, Vertical };

// One signal head per light. Green releases the horizontal axis, red releases
// the vertical axis, yellow holds both.
enum class LightPhase : std::uint8_t { Green, Red, Yellow };

inline constexpr Axis axis_of(Direction d) {
    return (d == Direction::Right || d == Direction::Left) ? Axis::Horizontal : Axis::Vertical;
}

inline constexpr bool phase_permits(LightPhase phase, Axis axis) {
    switch (phase) {
        case LightPhase::Green: return axis == Axis::Horizontal;
        case LightPhase::Red: return axis == Axis::Vertical;
        case LightPhase::Yellow: return false;
    }
    return false;
}

inline constexpr Vec2 unit_vector(Direction d) {
    switch (d) {
        case Direction::Right: return {1.0, 0.0};
        case Direction::Left: return {-1.0, 0.0};
        case Direction::Down: return {0.0, 1.0};
        case Direction::Up: return {0.0, -1.0};
    }
    return {};
}

// Signed distance travelled along `d`; larger means further downstream.
inline constexpr double progress_along(Direction d, Vec2 p) {
    switch (d) {
        case Direction::Right: return p.x;
        case Direction::Left: return -p.x;
        case Direction::Down: return p.y;
        case Direction::Up: return -p.y;
    }
    return 0.0;
}

// Coordinate that stays fixed while travelling along `d` (the lane line).
inline constexpr double lane_coordinate(Direction d, Vec2 p) {
    return axis_of(d) == Axis::Horizontal ? p.y : p.x;
}

std::string_view to_string(Direction d);
std::string_view to_string(LightPhase p);

using PhaseSet = std::vector<LightPhase>;

struct Vehicle {
    std::uint64_t id = 0;
    Vec2 pos;
    Direction dir = Direction::Right;
    bool moving = false;
    std::int64_t stopped_frames = 0;
    std::int64_t spawn_frame = 0;
    std::uint32_t crossed_lights = 0;  // bit i set once light i has been passed

    bool has_crossed(int light) const { return (crossed_lights >> light) & 1U; }
};

struct TrafficLight {
    int id = 0;
    Vec2 pos;
    LightPhase phase = LightPhase::Green;
    std::int64_t frames_in_phase = 0;
};

struct Crossing {
    std::uint64_t vehicle_id = 0;
    int light = 0;
    Direction dir = Direction::Right;
    bool permitted = false;  // the light's phase released this vehicle's axis
};

struct FrameEvents {
    std::vector<Crossing> crossings;
    std::int64_t exits = 0;
    std::vector<int> moved_on_permitted_axis;  // indexed by light id
};

struct RunMetrics {
    std::int64_t vehicles_passed = 0;
    double total_wait = 0.0;
    double mean_wait_per_vehicle = 0.0;
    std::int64_t spawned = 0;

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

}  // namespace trafficrl::sim
