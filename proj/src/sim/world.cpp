#include "trafficrl/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "trafficrl/errors.hpp"

namespace trafficrl::sim {

std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Right: return "RIGHT";
        case Direction::Left: return "LEFT";
        case Direction::Down: return "DOWN";
        case Direction::Up: return "UP";
    }
    return "?";
}

std::string_view to_string(LightPhase p) {
    switch (p) {
        case LightPhase::Green: return "GREEN";
        case LightPhase::Red: return "RED";
        case LightPhase::Yellow: return "YELLOW";
    }
    return "?";
}

void SimConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid sim config: " + what); };
    if (!(arena_width > 0.0) || !(arena_height > 0.0)) fail("arena dimensions must be positive");
    if (fps <= 0) fail("fps must be positive");
    if (!(duration > 0.0)) fail("duration must be positive");
    if (!(spawn_interval > 0.0)) fail("spawn_interval must be positive");
    if (spawn_interval * fps < 1.0 - 1e-9) fail("spawn_interval shorter than one frame");
    if (!(vehicle_speed >= 0.0) || !(vehicle_length > 0.0) || !(min_gap >= 0.0)) {
        fail("vehicle kinematics must be non-negative");
    }
    if (!(detection_radius > 0.0) || !(governing_band >= 0.0) || !(stop_line_offset >= 0.0)) {
        fail("detection geometry must be non-negative");
    }
    if (light_positions.empty() || light_positions.size() > 32) fail("need 1..32 lights");
    if (spawning && spawn_points.empty()) fail("spawning enabled without spawn points");
    for (const auto& sp : spawn_points) {
        const bool on_x_edge = sp.pos.x == 0.0 || sp.pos.x == arena_width;
        const bool on_y_edge = sp.pos.y == 0.0 || sp.pos.y == arena_height;
        const bool inside = sp.pos.x >= 0.0 && sp.pos.x <= arena_width && sp.pos.y >= 0.0 &&
                            sp.pos.y <= arena_height;
        if (!inside || !(on_x_edge || on_y_edge)) fail("spawn point off the arena boundary");
    }
}

std::int64_t SimConfig::total_frames() const {
    return static_cast<std::int64_t>(std::llround(duration * fps));
}

std::optional<int> governing_light(const Vehicle& vehicle, std::span<const TrafficLight> lights,
                                   const SimConfig& config) {
    const double here = progress_along(vehicle.dir, vehicle.pos);
    const double lane = lane_coordinate(vehicle.dir, vehicle.pos);
    std::optional<int> best;
    double best_dist = 0.0;
    for (const auto& light : lights) {
        if (vehicle.has_crossed(light.id)) continue;
        if (std::abs(lane_coordinate(vehicle.dir, light.pos) - lane) > config.governing_band) continue;
        const double ahead = progress_along(vehicle.dir, light.pos) - here;
        if (ahead <= 0.0) continue;
        if (!best || ahead < best_dist) {
            best = light.id;
            best_dist = ahead;
        }
    }
    return best;
}

World::World(SimConfig config, std::uint64_t seed) : config_(std::move(config)), rng_(seed) {
    config_.validate();
    total_frames_ = config_.total_frames();
    lights_.reserve(config_.light_positions.size());
    for (std::size_t i = 0; i < config_.light_positions.size(); ++i) {
        lights_.push_back({static_cast<int>(i), config_.light_positions[i], LightPhase::Green, 0});
    }
}

void World::apply_phases(std::span<const LightPhase> phases) {
    if (phases.size() != lights_.size()) {
        throw std::invalid_argument("phase count does not match light count");
    }
    for (std::size_t i = 0; i < lights_.size(); ++i) {
        if (lights_[i].phase != phases[i]) {
            lights_[i].phase = phases[i];
            lights_[i].frames_in_phase = 0;
        }
    }
}

bool World::spawn_tick() {
    if (!config_.spawning) return false;
    // Spawn k fires at frame ceil(k * interval * fps) while k * interval < duration.
    const double frames_per_spawn = config_.spawn_interval * config_.fps;
    const std::int64_t index = spawned_timer_;
    if (static_cast<double>(index) * config_.spawn_interval >= config_.duration - 1e-9) return false;
    const auto due = static_cast<std::int64_t>(std::ceil(static_cast<double>(index) * frames_per_spawn - 1e-9));
    if (frame_ < due) return false;
    ++spawned_timer_;
    spawn_vehicle();
    return true;
}

const Vehicle& World::spawn_vehicle() {
    const auto& points = config_.spawn_points;
    const auto& sp = points[rng_.uniform_index(points.size())];
    return add_vehicle(sp.pos, sp.dir);
}

const Vehicle& World::add_vehicle(Vec2 pos, Direction dir, bool moving) {
    Vehicle v;
    v.id = next_id_++;
    v.pos = pos;
    v.dir = dir;
    v.moving = moving;
    v.spawn_frame = frame_;
    vehicles_.push_back(v);
    ++spawned_;
    return vehicles_.back();
}

bool World::blocked(const Vehicle& v, const Vehicle* leader) const {
    const double here = progress_along(v.dir, v.pos);
    if (leader != nullptr && !leader->moving) {
        const double gap = progress_along(v.dir, leader->pos) - here;
        if (gap <= config_.vehicle_length + config_.min_gap) return true;
    }
    const auto g = governing_light(v, lights_, config_);
    if (!g) return false;
    const auto& light = lights_[*g];
    if (phase_permits(light.phase, axis_of(v.dir))) return false;
    const double stop_line = progress_along(v.dir, light.pos) - config_.stop_line_offset;
    const double front = here + 0.5 * config_.vehicle_length;
    // Once the center is past the stop line the vehicle is committed to the box.
    return here <= stop_line && front + config_.step_distance() > stop_line;
}

namespace {

// Leader ordering within a lane: further downstream first, older first on ties.
bool ahead_of(const Vehicle& a, const Vehicle& b) {
    const double pa = progress_along(a.dir, a.pos);
    const double pb = progress_along(b.dir, b.pos);
    if (pa != pb) return pa > pb;
    return a.id < b.id;
}

bool same_lane(const Vehicle& a, const Vehicle& b) {
    return a.dir == b.dir && lane_coordinate(a.dir, a.pos) == lane_coordinate(b.dir, b.pos);
}

}  // namespace

bool can_move(const Vehicle& vehicle, const World& world) {
    const Vehicle* leader = nullptr;
    for (const auto& other : world.vehicles()) {
        if (other.id == vehicle.id || !same_lane(other, vehicle) || !ahead_of(other, vehicle)) continue;
        if (leader == nullptr || ahead_of(*leader, other)) leader = &other;
    }
    return !world.blocked(vehicle, leader);
}

FrameEvents World::step(std::span<const LightPhase> phases) {
    apply_phases(phases);
    spawn_tick();

    FrameEvents events;
    events.moved_on_permitted_axis.assign(lights_.size(), 0);

    std::vector<std::size_t> order(vehicles_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [this](std::size_t i, std::size_t j) {
        const auto& a = vehicles_[i];
        const auto& b = vehicles_[j];
        if (a.dir != b.dir) return a.dir < b.dir;
        const double la = lane_coordinate(a.dir, a.pos);
        const double lb = lane_coordinate(b.dir, b.pos);
        if (la != lb) return la < lb;
        return ahead_of(a, b);
    });

    const double step = config_.step_distance();
    const Vehicle* leader = nullptr;
    for (std::size_t k = 0; k < order.size(); ++k) {
        Vehicle& v = vehicles_[order[k]];
        if (leader != nullptr && !same_lane(*leader, v)) leader = nullptr;

        if (blocked(v, leader)) {
            v.moving = false;
            ++v.stopped_frames;
        } else {
            const auto g = governing_light(v, lights_, config_);
            const Vec2 u = unit_vector(v.dir);
            v.pos.x += u.x * step;
            v.pos.y += u.y * step;
            v.moving = true;
            if (g) {
                const auto& light = lights_[*g];
                if (progress_along(v.dir, v.pos) >= progress_along(v.dir, light.pos)) {
                    v.crossed_lights |= (1U << light.id);
                    const bool permitted = phase_permits(light.phase, axis_of(v.dir));
                    events.crossings.push_back({v.id, light.id, v.dir, permitted});
                    if (permitted) ++events.moved_on_permitted_axis[light.id];
                }
            }
        }
        leader = &v;
    }

    const auto outside = [this](const Vehicle& v) {
        return v.pos.x < 0.0 || v.pos.x > config_.arena_width || v.pos.y < 0.0 ||
               v.pos.y > config_.arena_height;
    };
    for (const auto& v : vehicles_) {
        if (outside(v)) {
            ++events.exits;
            exited_stopped_frames_ += v.stopped_frames;
        }
    }
    std::erase_if(vehicles_, outside);
    exited_ += events.exits;

    ++frame_;
    for (auto& light : lights_) ++light.frames_in_phase;
    return events;
}

double World::total_wait() const {
    std::int64_t frames = exited_stopped_frames_;
    for (const auto& v : vehicles_) frames += v.stopped_frames;
    return seconds(frames);
}

RunMetrics World::finalize() const {
    if (!finished()) {
        throw StateError("finalize called at t=" + std::to_string(clock()) + " s before the run ended");
    }
    RunMetrics m;
    m.vehicles_passed = exited_;
    m.spawned = spawned_;
    m.total_wait = total_wait();
    m.mean_wait_per_vehicle = spawned_ > 0 ? m.total_wait / static_cast<double>(spawned_) : 0.0;
    return m;
}

}  // namespace trafficrl::sim
