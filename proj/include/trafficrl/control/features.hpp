#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "trafficrl/sim/config.hpp"
#include "trafficrl/sim/types.hpp"
#include "trafficrl/sim/world.hpp"

namespace trafficrl::control {

// Side of the intersection a vehicle approaches from.
enum class Approach : std::uint8_t { North, South, East, West };

inline constexpr std::array<Approach, 4> kApproaches{Approach::North, Approach::South, Approach::East,
                                                    Approach::West};

inline constexpr Approach approach_of(sim::Direction d) {
    switch (d) {
        case sim::Direction::Down: return Approach::North;
        case sim::Direction::Up: return Approach::South;
        case sim::Direction::Left: return Approach::East;
        case sim::Direction::Right: return Approach::West;
    }
    return Approach::North;
}

inline constexpr std::size_t kFeaturesPerLight = 20;
inline constexpr double kQueueNormalizer = 20.0;

// Per light block layout (offsets into the 20 entries).
inline constexpr std::size_t kQueueOffset = 0;
inline constexpr std::size_t kDistanceOffset = 4;
inline constexpr std::size_t kMovingOffset = 8;
inline constexpr std::size_t kSpatialOffset = 12;  // (dx, dy) pairs, N S E W

using FeatureVector = std::vector<double>;

// Light ids ordered by (y, x) ascending; this is the block order of the feature vector.
std::vector<int> feature_light_order(std::span<const sim::TrafficLight> lights);

// Vehicles governed by `light` whose center lies within the detection radius.
std::vector<const sim::Vehicle*> approaching_vehicles(std::span<const sim::Vehicle> vehicles,
                                                      std::span<const sim::TrafficLight> lights,
                                                      int light, const sim::SimConfig& config);

FeatureVector featurize(std::span<const sim::Vehicle> vehicles, std::span<const sim::TrafficLight> lights,
                        const sim::SimConfig& config);

inline FeatureVector featurize(const sim::World& world) {
    return featurize(world.vehicles(), world.lights(), world.config());
}

inline std::size_t feature_size(std::size_t light_count) { return light_count * kFeaturesPerLight; }

}  // namespace trafficrl::control
