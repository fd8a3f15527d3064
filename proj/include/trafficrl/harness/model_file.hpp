#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "trafficrl/rl/dqn.hpp"
#include "trafficrl/rl/network.hpp"
#include "trafficrl/rl/trainer.hpp"
#include "trafficrl/sim/config.hpp"

namespace trafficrl::harness {

inline constexpr const char* kModelFormat = "trafficrl-model";
inline constexpr int kModelVersion = 1;

struct TrainingMetadata {
    int episodes = 0;
    std::uint64_t seed = 0;
    rl::Hyperparams hp;
    rl::ControlTiming timing;
    double episode_duration = 0.0;
    long constraint_violations = 0;
    long decision_ticks = 0;
};

/// One network per light, in light-id order, plus what is needed to check
/// that a world produces inputs in the layout the networks were trained on.
struct ModelFile {
    int light_count = 0;
    std::vector<sim::Vec2> light_positions;  // light-id order
    double detection_radius = 0.0;
    std::vector<rl::QNetwork> networks;
    TrainingMetadata training;
};

ModelFile make_model_file(const rl::TrainingResult& result, const sim::SimConfig& sim, int episodes,
                          std::uint64_t seed, const rl::Hyperparams& hp, const rl::ControlTiming& timing);

// Describes the feature vector layout; stored verbatim and compared on load.
nlohmann::ordered_json feature_layout(const sim::SimConfig& sim);

nlohmann::ordered_json to_json(const ModelFile& model);

// FormatError on wrong format/version or inconsistent shapes.
ModelFile model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

// ConfigError unless the model's light count, layout and input size fit `sim`.
void check_compatible(const ModelFile& model, const sim::SimConfig& sim);

}  // namespace trafficrl::harness
