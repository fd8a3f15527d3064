#include "trafficrl/harness/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include "trafficrl/errors.hpp"

namespace trafficrl::harness {

namespace {

using Setter = std::function<void(const nlohmann::json&, ExperimentConfig&)>;

template <typename T>
bool has_type(const nlohmann::json& v) {
    if constexpr (std::is_same_v<T, bool>) {
        return v.is_boolean();
    } else if constexpr (std::is_unsigned_v<T>) {
        return v.is_number_unsigned();
    } else if constexpr (std::is_integral_v<T>) {
        return v.is_number_integer();
    } else if constexpr (std::is_floating_point_v<T>) {
        return v.is_number();
    } else {
        return v.is_string();
    }
}

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
    if (!has_type<T>(v)) throw ConfigError("config key '" + key + "' has the wrong type: " + v.dump());
    return v.get<T>();
}

template <typename T, typename Field>
std::pair<std::string, Setter> field(std::string key, Field field) {
    auto k = key;
    return {std::move(key), [k, field](const nlohmann::json& v, ExperimentConfig& c) { field(c) = get_as<T>(v, k); }};
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto add = [&t](std::pair<std::string, Setter> p) { t.insert(std::move(p)); };
        add(field<double>("sim.arena_width", [](ExperimentConfig& c) -> double& { return c.sim.arena_width; }));
        add(field<double>("sim.arena_height", [](ExperimentConfig& c) -> double& { return c.sim.arena_height; }));
        add(field<double>("sim.spawn_interval", [](ExperimentConfig& c) -> double& { return c.sim.spawn_interval; }));
        add(field<bool>("sim.spawning", [](ExperimentConfig& c) -> bool& { return c.sim.spawning; }));
        add(field<int>("sim.fps", [](ExperimentConfig& c) -> int& { return c.sim.fps; }));
        add(field<double>("sim.duration", [](ExperimentConfig& c) -> double& { return c.sim.duration; }));
        add(field<double>("sim.vehicle_speed", [](ExperimentConfig& c) -> double& { return c.sim.vehicle_speed; }));
        add(field<double>("sim.vehicle_length", [](ExperimentConfig& c) -> double& { return c.sim.vehicle_length; }));
        add(field<double>("sim.stop_line_offset",
                          [](ExperimentConfig& c) -> double& { return c.sim.stop_line_offset; }));
        add(field<double>("sim.min_gap", [](ExperimentConfig& c) -> double& { return c.sim.min_gap; }));
        add(field<double>("sim.detection_radius",
                          [](ExperimentConfig& c) -> double& { return c.sim.detection_radius; }));
        add(field<double>("sim.governing_band", [](ExperimentConfig& c) -> double& { return c.sim.governing_band; }));

        add(field<double>("hp.gamma", [](ExperimentConfig& c) -> double& { return c.hp.gamma; }));
        add(field<double>("hp.lr", [](ExperimentConfig& c) -> double& { return c.hp.lr; }));
        add(field<std::size_t>("hp.batch", [](ExperimentConfig& c) -> std::size_t& { return c.hp.batch; }));
        add(field<std::size_t>("hp.buffer_capacity",
                               [](ExperimentConfig& c) -> std::size_t& { return c.hp.buffer_capacity; }));
        add(field<long>("hp.target_sync_every", [](ExperimentConfig& c) -> long& { return c.hp.target_sync_every; }));
        add(field<double>("hp.eps0", [](ExperimentConfig& c) -> double& { return c.hp.eps0; }));
        add(field<double>("hp.eps_min", [](ExperimentConfig& c) -> double& { return c.hp.eps_min; }));
        add(field<double>("hp.eps_decay", [](ExperimentConfig& c) -> double& { return c.hp.eps_decay; }));
        t["hp.hidden"] = [](const nlohmann::json& v, ExperimentConfig& c) {
            if (!v.is_array() || v.empty()) throw ConfigError("config key 'hp.hidden' must be a non-empty array");
            std::vector<std::size_t> sizes;
            for (const auto& x : v) sizes.push_back(get_as<std::size_t>(x, "hp.hidden"));
            c.hp.hidden = std::move(sizes);
        };

        add(field<int>("control.decision_frames",
                       [](ExperimentConfig& c) -> int& { return c.timing.decision_frames; }));
        add(field<double>("control.t_min", [](ExperimentConfig& c) -> double& { return c.timing.t_min; }));
        add(field<double>("control.t_max", [](ExperimentConfig& c) -> double& { return c.timing.t_max; }));

        add(field<int>("train.episodes", [](ExperimentConfig& c) -> int& { return c.episodes; }));
        add(field<std::uint64_t>("train.seed", [](ExperimentConfig& c) -> std::uint64_t& { return c.train_seed; }));

        add(field<int>("experiment.runs", [](ExperimentConfig& c) -> int& { return c.runs; }));
        t["experiment.base_seed"] = [](const nlohmann::json& v, ExperimentConfig& c) {
            c.base_seed = get_as<std::uint64_t>(v, "experiment.base_seed");
        };
        t["experiment.model"] = [](const nlohmann::json& v, ExperimentConfig& c) {
            c.model_path = get_as<std::string>(v, "experiment.model");
        };
        t["experiment.out_dir"] = [](const nlohmann::json& v, ExperimentConfig& c) {
            c.out_dir = get_as<std::string>(v, "experiment.out_dir");
        };
        return t;
    }();
    return table;
}

}  // namespace

std::uint64_t ExperimentConfig::run_seed(int k, std::uint64_t fallback_train_seed) const {
    const std::uint64_t base = base_seed ? *base_seed : fallback_train_seed + kEvalSeedOffset;
    return base + static_cast<std::uint64_t>(k);
}

void ExperimentConfig::validate() const {
    sim.validate();
    hp.validate();
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (timing.decision_frames < 1) throw ConfigError("control.decision_frames must be >= 1");
    if (!(timing.t_min >= 0.0) || !(timing.t_max >= timing.t_min)) {
        throw ConfigError("control timing needs 0 <= t_min <= t_max");
    }
}

void apply_config_json(const nlohmann::json& flat, ExperimentConfig& config) {
    if (!flat.is_object()) throw ConfigError("config must be a JSON object of dotted keys");
    const auto& table = setters();
    for (const auto& [key, value] : flat.items()) {
        const auto it = table.find(key);
        if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(value, config);
    }
}

void apply_config_file(const std::filesystem::path& path, ExperimentConfig& config) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    apply_config_json(j, config);
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["sim.arena_width"] = c.sim.arena_width;
    j["sim.arena_height"] = c.sim.arena_height;
    j["sim.spawn_interval"] = c.sim.spawn_interval;
    j["sim.spawning"] = c.sim.spawning;
    j["sim.fps"] = c.sim.fps;
    j["sim.duration"] = c.sim.duration;
    j["sim.vehicle_speed"] = c.sim.vehicle_speed;
    j["sim.vehicle_length"] = c.sim.vehicle_length;
    j["sim.stop_line_offset"] = c.sim.stop_line_offset;
    j["sim.min_gap"] = c.sim.min_gap;
    j["sim.detection_radius"] = c.sim.detection_radius;
    j["sim.governing_band"] = c.sim.governing_band;
    j["hp.gamma"] = c.hp.gamma;
    j["hp.lr"] = c.hp.lr;
    j["hp.batch"] = c.hp.batch;
    j["hp.buffer_capacity"] = c.hp.buffer_capacity;
    j["hp.target_sync_every"] = c.hp.target_sync_every;
    j["hp.eps0"] = c.hp.eps0;
    j["hp.eps_min"] = c.hp.eps_min;
    j["hp.eps_decay"] = c.hp.eps_decay;
    j["hp.hidden"] = c.hp.hidden;
    j["control.decision_frames"] = c.timing.decision_frames;
    j["control.t_min"] = c.timing.t_min;
    j["control.t_max"] = c.timing.t_max;
    j["train.episodes"] = c.episodes;
    j["train.seed"] = c.train_seed;
    j["experiment.runs"] = c.runs;
    if (c.base_seed) j["experiment.base_seed"] = *c.base_seed;
    j["experiment.model"] = c.model_path.string();
    j["experiment.out_dir"] = c.out_dir.string();
    return j;
}

void apply_environment(ExperimentConfig& config) {
    if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') config.out_dir = dir;
}

}  // namespace trafficrl::harness
