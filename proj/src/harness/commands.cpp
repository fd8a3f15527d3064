#include "trafficrl/harness/commands.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "trafficrl/control/fixed_time.hpp"
#include "trafficrl/errors.hpp"

namespace trafficrl::harness {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void write_trace_line(std::ostream& out, const sim::World& world, const sim::FrameEvents& events) {
    nlohmann::ordered_json j;
    j["frame"] = world.frame() - 1;
    auto phases = nlohmann::ordered_json::array();
    for (const auto& l : world.lights()) phases.push_back(std::string(sim::to_string(l.phase)));
    j["phases"] = std::move(phases);
    j["vehicles"] = world.vehicles().size();
    auto crossings = nlohmann::ordered_json::array();
    for (const auto& c : events.crossings) {
        crossings.push_back({{"vehicle", c.vehicle_id},
                             {"light", c.light},
                             {"direction", std::string(sim::to_string(c.dir))},
                             {"permitted", c.permitted}});
    }
    j["crossings"] = std::move(crossings);
    j["exits"] = events.exits;
    out << j.dump() << '\n';
}

// Fails now, not after a long job, if `path` cannot be created or written.
void ensure_writable(const std::filesystem::path& path) {
    const bool existed = std::filesystem::exists(path);
    {
        std::ofstream probe(path, std::ios::app | std::ios::binary);
        if (!probe) throw IoError("cannot write to " + path.string());
    }
    if (!existed) std::filesystem::remove(path);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

RunRecord run_once(ControllerKind controller, std::uint64_t seed, const sim::SimConfig& sim, const ModelFile* model,
                   std::ostream* trace) {
    const auto start = std::chrono::steady_clock::now();
    sim::World world(sim, seed);
    control::FrameObserver observer;
    if (trace != nullptr) {
        observer = [trace](const sim::World& w, const sim::FrameEvents& e) { write_trace_line(*trace, w, e); };
    }
    sim::RunMetrics metrics;
    if (controller == ControllerKind::Fixed) {
        control::FixedTimeController fixed;
        metrics = control::run_episode(world, fixed, observer);
    } else {
        if (model == nullptr) throw UsageError("the marl controller needs a trained model (--model)");
        check_compatible(*model, sim);
        rl::MarlController marl(model->networks, model->training.timing, sim.fps);
        metrics = control::run_episode(world, marl, observer);
        if (marl.audit().violations() != 0) {
            throw StateError("hold constraint violated " + std::to_string(marl.audit().violations()) +
                             " times during evaluation");
        }
    }
    return RunRecord::from_metrics(controller, seed, metrics, seconds_since(start));
}

RunRecord cmd_simulate(const ExperimentConfig& config, const SimulateOptions& options) {
    if (options.controller == ControllerKind::Marl && !options.model) {
        throw UsageError("--controller marl requires --model");
    }
    config.sim.validate();
    std::optional<ModelFile> model;
    if (options.model) {
        model = load_model(*options.model);
        check_compatible(*model, config.sim);
    }
    std::ofstream trace;
    if (options.trace) {
        trace.open(*options.trace, std::ios::binary);
        if (!trace) throw IoError("cannot write trace file " + options.trace->string());
    }
    auto record = run_once(options.controller, options.seed, config.sim, model ? &*model : nullptr,
                           options.trace ? &trace : nullptr);
    if (options.trace && !trace) throw IoError("write failed for trace file " + options.trace->string());
    return record;
}

std::filesystem::path default_training_log_path(const std::filesystem::path& model_path) {
    auto p = model_path;
    p.replace_extension(".training.csv");
    return p;
}

void write_training_log(const std::filesystem::path& path, const std::vector<rl::EpisodeLog>& log) {
    std::string text = "episode,mean_reward,mean_loss,epsilon\n";
    for (const auto& e : log) {
        text += std::to_string(e.episode + 1) + ',' + format_double(e.mean_reward) + ',' + format_double(e.mean_loss) +
                ',' + format_double(e.epsilon) + '\n';
    }
    write_text(path, text);
}

TrainOutcome cmd_train(const ExperimentConfig& config, const std::filesystem::path& model_path,
                       std::optional<std::filesystem::path> log_path, std::ostream* progress) {
    config.validate();
    TrainOutcome out;
    out.model_path = model_path;
    out.log_path = log_path ? *log_path : default_training_log_path(model_path);
    ensure_writable(out.model_path);
    ensure_writable(out.log_path);

    rl::TrainOptions options;
    options.sim = config.sim;
    options.hp = config.hp;
    options.timing = config.timing;
    options.episodes = config.episodes;
    options.seed = config.train_seed;

    const auto start = std::chrono::steady_clock::now();
    auto result = rl::train([&](std::uint64_t seed) { return sim::World(config.sim, seed); }, options,
                            [&](const rl::EpisodeLog& e) {
                                if (progress == nullptr) return;
                                *progress << "episode " << (e.episode + 1) << '/' << config.episodes
                                          << "  reward " << format_double(e.mean_reward) << "  loss "
                                          << format_double(e.mean_loss) << "  eps " << format_double(e.epsilon)
                                          << "  passed " << e.metrics.vehicles_passed << "  wait "
                                          << format_double(e.metrics.total_wait) << "  (" << seconds_since(start)
                                          << " s)" << std::endl;
                            });
    out.model = make_model_file(result, config.sim, config.episodes, config.train_seed, config.hp, config.timing);
    out.log = std::move(result.log);
    save_model(out.model_path, out.model);
    write_training_log(out.log_path, out.log);
    return out;
}

ExperimentOutcome cmd_experiment(const ExperimentConfig& config, unsigned jobs, std::ostream* progress) {
    config.validate();
    if (config.model_path.empty()) throw UsageError("experiment needs a trained model (--model)");
    const auto model = load_model(config.model_path);
    check_compatible(model, config.sim);

    std::filesystem::create_directories(config.out_dir);
    for (const char* name : {kFixedRunsFile, kMarlRunsFile, kRecordsFile, kReportJsonFile, kReportTextFile,
                             kExperimentLogFile}) {
        ensure_writable(config.out_dir / name);
    }

    const auto runs = static_cast<std::size_t>(config.runs);
    // Slot 2k is fixed-time run k, slot 2k+1 the MARL run on the same seed.
    std::vector<RunRecord> records(2 * runs);
    std::vector<std::exception_ptr> errors(2 * runs);
    std::atomic<std::size_t> next{0};
    std::mutex progress_mutex;

    auto worker = [&] {
        for (std::size_t slot = next++; slot < records.size(); slot = next++) {
            const auto k = slot / 2;
            const auto kind = slot % 2 == 0 ? ControllerKind::Fixed : ControllerKind::Marl;
            const auto seed = config.run_seed(static_cast<int>(k), model.training.seed);
            try {
                records[slot] = run_once(kind, seed, config.sim, &model);
            } catch (const std::exception& e) {
                errors[slot] = std::make_exception_ptr(std::runtime_error(
                    to_string(kind) + " run " + std::to_string(k + 1) + " (seed " + std::to_string(seed) +
                    ") failed: " + e.what()));
            }
            if (progress != nullptr) {
                std::lock_guard lock(progress_mutex);
                *progress << to_string(kind) << " seed " << seed << " done" << std::endl;
            }
        }
    };
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(records.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < jobs; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    ExperimentOutcome out;
    for (std::size_t k = 0; k < runs; ++k) {
        out.fixed.push_back(records[2 * k]);
        out.marl.push_back(records[2 * k + 1]);
    }
    out.report = stats::run_full_comparison(to_columns(out.fixed), to_columns(out.marl));

    write_runs_csv(config.out_dir / kFixedRunsFile, out.fixed);
    write_runs_csv(config.out_dir / kMarlRunsFile, out.marl);

    nlohmann::ordered_json rec;
    rec["fixed"] = nlohmann::ordered_json::array();
    rec["marl"] = nlohmann::ordered_json::array();
    for (const auto& r : out.fixed) rec["fixed"].push_back(to_json(r));
    for (const auto& r : out.marl) rec["marl"].push_back(to_json(r));
    write_text(config.out_dir / kRecordsFile, rec.dump(2) + "\n");

    auto report = stats::to_json(out.report);
    report["config"] = config_to_json(config);
    report["config"].erase("experiment.out_dir");
    report["model_training_seed"] = model.training.seed;
    write_text(config.out_dir / kReportJsonFile, report.dump(2) + "\n");
    write_text(config.out_dir / kReportTextFile, stats::to_text(out.report));

    std::string log;
    double total = 0.0;
    for (const auto* side : {&out.fixed, &out.marl}) {
        for (const auto& r : *side) {
            log += to_string(r.controller) + " seed " + std::to_string(r.seed) + " wall " +
                   std::to_string(r.wall_seconds) + " s\n";
            total += r.wall_seconds;
        }
    }
    log += "total run time " + std::to_string(total) + " s on " + std::to_string(jobs) + " thread(s)\n";
    write_text(config.out_dir / kExperimentLogFile, log);
    return out;
}

stats::TestReport cmd_stats(const std::filesystem::path& fixed_csv, const std::filesystem::path& marl_csv,
                            std::vector<std::string>* warnings, double alpha) {
    const auto fixed = read_runs_csv(fixed_csv);
    const auto marl = read_runs_csv(marl_csv);
    if (warnings != nullptr) {
        warnings->insert(warnings->end(), fixed.warnings.begin(), fixed.warnings.end());
        warnings->insert(warnings->end(), marl.warnings.begin(), marl.warnings.end());
    }
    return stats::run_full_comparison(to_columns(fixed), to_columns(marl), alpha);
}

}  // namespace trafficrl::harness
