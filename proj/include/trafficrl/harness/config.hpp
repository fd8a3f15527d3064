#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "trafficrl/rl/dqn.hpp"
#include "trafficrl/rl/trainer.hpp"
#include "trafficrl/sim/config.hpp"

namespace trafficrl::harness {

// Environment variable that replaces the configured output directory.
inline constexpr const char* kOutDirEnv = "TRAFFICRL_OUT_DIR";

// Evaluation seeds default to the training seed shifted by this much, so
// evaluation never replays a spawn sequence seen in training.
inline constexpr std::uint64_t kEvalSeedOffset = 10000;

struct ExperimentConfig {
    sim::SimConfig sim;
    rl::Hyperparams hp;
    rl::ControlTiming timing;
    int episodes = 20;
    std::uint64_t train_seed = 0;
    int runs = 20;
    std::optional<std::uint64_t> base_seed;  // unset: train_seed + kEvalSeedOffset
    std::filesystem::path model_path;
    std::filesystem::path out_dir = ".";

    // Seed of evaluation run k (0-based).
    std::uint64_t run_seed(int k, std::uint64_t fallback_train_seed) const;
    void validate() const;
};

/// Applies a flat object of dotted keys ("sim.duration", "hp.lr",
/// "experiment.runs", ...) onto `config`. Unknown keys and wrongly typed values
/// raise ConfigError naming the key.
void apply_config_json(const nlohmann::json& flat, ExperimentConfig& config);

// Reads and applies a config file; FormatError if it is not valid JSON.
void apply_config_file(const std::filesystem::path& path, ExperimentConfig& config);

// Every accepted key with its current value, in a stable order.
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

// Replaces out_dir with $TRAFFICRL_OUT_DIR when that is set and non-empty.
void apply_environment(ExperimentConfig& config);

}  // namespace trafficrl::harness
