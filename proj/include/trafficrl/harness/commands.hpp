#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trafficrl/harness/config.hpp"
#include "trafficrl/harness/model_file.hpp"
#include "trafficrl/harness/records.hpp"
#include "trafficrl/rl/trainer.hpp"
#include "trafficrl/stats/comparison.hpp"

namespace trafficrl::harness {

/// One evaluation episode. MARL runs act greedily through the hold
/// constraints, using the decision timing stored in the model. When `trace`
/// is given, one JSON object per frame is written to it.
RunRecord run_once(ControllerKind controller, std::uint64_t seed, const sim::SimConfig& sim, const ModelFile* model,
                   std::ostream* trace = nullptr);

struct SimulateOptions {
    ControllerKind controller = ControllerKind::Fixed;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> model;
    std::optional<std::filesystem::path> trace;
};

// UsageError for marl without a model; nothing is written in that case.
RunRecord cmd_simulate(const ExperimentConfig& config, const SimulateOptions& options);

struct TrainOutcome {
    ModelFile model;
    std::vector<rl::EpisodeLog> log;
    std::filesystem::path model_path;
    std::filesystem::path log_path;
};

// Training log written next to the model: model.json -> model.training.csv.
std::filesystem::path default_training_log_path(const std::filesystem::path& model_path);

/// Trains on worlds seeded train_seed + episode and writes the model and the
/// per-episode log. Both output paths are checked for writability first, so a
/// bad path fails in milliseconds rather than after training.
TrainOutcome cmd_train(const ExperimentConfig& config, const std::filesystem::path& model_path,
                       std::optional<std::filesystem::path> log_path = std::nullopt,
                       std::ostream* progress = nullptr);

void write_training_log(const std::filesystem::path& path, const std::vector<rl::EpisodeLog>& log);

struct ExperimentOutcome {
    std::vector<RunRecord> fixed;
    std::vector<RunRecord> marl;
    stats::TestReport report;
};

// Output files written by cmd_experiment into the output directory.
inline constexpr const char* kFixedRunsFile = "fixed_runs.csv";
inline constexpr const char* kMarlRunsFile = "marl_runs.csv";
inline constexpr const char* kRecordsFile = "records.json";
inline constexpr const char* kReportJsonFile = "report.json";
inline constexpr const char* kReportTextFile = "report.txt";
inline constexpr const char* kExperimentLogFile = "experiment.log";  // wall-clock timings only

/// `runs` fixed-time and `runs` MARL evaluations on seeds base .. base+runs-1,
/// then the two-sample comparison. Runs may execute on `jobs` threads; records
/// are always written in seed order. A failing run aborts the batch with its
/// seed in the message.
ExperimentOutcome cmd_experiment(const ExperimentConfig& config, unsigned jobs = 1, std::ostream* progress = nullptr);

stats::TestReport cmd_stats(const std::filesystem::path& fixed_csv, const std::filesystem::path& marl_csv,
                            std::vector<std::string>* warnings = nullptr, double alpha = 0.05);

}  // namespace trafficrl::harness
