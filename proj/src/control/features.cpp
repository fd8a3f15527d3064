#include "trafficrl/control/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace trafficrl::control {

std::vector<int> feature_light_order(std::span<const sim::TrafficLight> lights) {
    std::vector<int> order(lights.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& pa = lights[a].pos;
        const auto& pb = lights[b].pos;
        if (pa.y != pb.y) return pa.y < pb.y;
        return pa.x < pb.x;
    });
    return order;
}

std::vector<const sim::Vehicle*> approaching_vehicles(std::span<const sim::Vehicle> vehicles,
                                                      std::span<const sim::TrafficLight> lights,
                                                      int light, const sim::SimConfig& config) {
    std::vector<const sim::Vehicle*> out;
    const auto& lp = lights[light].pos;
    const double r2 = config.detection_radius * config.detection_radius;
    for (const auto& v : vehicles) {
        const double dx = v.pos.x - lp.x;
        const double dy = v.pos.y - lp.y;
        if (dx * dx + dy * dy > r2) continue;
        const auto g = sim::governing_light(v, lights, config);
        if (g && *g == light) out.push_back(&v);
    }
    // Canonical order so sums do not depend on storage order.
    std::sort(out.begin(), out.end(), [](const sim::Vehicle* a, const sim::Vehicle* b) { return a->id < b->id; });
    return out;
}

FeatureVector featurize(std::span<const sim::Vehicle> vehicles, std::span<const sim::TrafficLight> lights,
                        const sim::SimConfig& config) {
    FeatureVector features(feature_size(lights.size()), 0.0);
    const double radius = config.detection_radius;
    const auto order = feature_light_order(lights);

    for (std::size_t block = 0; block < order.size(); ++block) {
        const int light = order[block];
        const auto& lp = lights[light].pos;
        double* f = features.data() + block * kFeaturesPerLight;

        std::array<std::vector<const sim::Vehicle*>, 4> by_approach;
        for (const auto* v : approaching_vehicles(vehicles, lights, light, config)) {
            by_approach[static_cast<std::size_t>(approach_of(v->dir))].push_back(v);
        }

        for (std::size_t a = 0; a < kApproaches.size(); ++a) {
            const auto& group = by_approach[a];
            if (group.empty()) {
                f[kDistanceOffset + a] = 1.0;
                continue;
            }
            double dist = 0.0, dx = 0.0, dy = 0.0;
            int moving = 0;
            for (const auto* v : group) {
                const double ox = v->pos.x - lp.x;
                const double oy = v->pos.y - lp.y;
                dist += std::hypot(ox, oy);
                dx += ox;
                dy += oy;
                moving += v->moving ? 1 : 0;
            }
            const double n = static_cast<double>(group.size());
            f[kQueueOffset + a] = std::min(1.0, n / kQueueNormalizer);
            f[kDistanceOffset + a] = dist / n / radius;
            f[kMovingOffset + a] = moving / n;
            f[kSpatialOffset + 2 * a] = dx / n / radius;
            f[kSpatialOffset + 2 * a + 1] = dy / n / radius;
        }
    }
    return features;
}

}  // namespace trafficrl::control
