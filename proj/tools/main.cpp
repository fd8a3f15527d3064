// Command-line front end: simulate, train, experiment, stats.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "trafficrl/errors.hpp"
#include "trafficrl/harness/commands.hpp"
#include "trafficrl/harness/config.hpp"

using namespace trafficrl;
using namespace trafficrl::harness;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kBadFormat = 3, kIo = 4 };

// Hyperparameter and timing flags shared by train and experiment.
struct Overrides {
    std::optional<double> duration;
    std::optional<double> gamma, lr, eps0, eps_min, eps_decay, t_min, t_max;
    std::optional<std::size_t> batch, buffer_capacity;
    std::optional<long> target_sync_every;
    std::optional<int> decision_frames;
    std::vector<std::size_t> hidden;

    void add_duration(CLI::App* cmd) {
        cmd->add_option("--duration", duration, "Simulated seconds per run")->check(CLI::PositiveNumber);
    }

    void add_training(CLI::App* cmd) {
        cmd->add_option("--gamma", gamma, "Discount factor");
        cmd->add_option("--lr", lr, "Adam learning rate");
        cmd->add_option("--batch", batch, "Mini-batch size");
        cmd->add_option("--buffer-capacity", buffer_capacity, "Replay buffer capacity");
        cmd->add_option("--target-sync-every", target_sync_every, "Updates between target network copies");
        cmd->add_option("--eps0", eps0, "Initial exploration rate");
        cmd->add_option("--eps-min", eps_min, "Exploration floor");
        cmd->add_option("--eps-decay", eps_decay, "Exploration decrease per update");
        cmd->add_option("--hidden", hidden, "Hidden layer sizes, e.g. --hidden 128 64");
        cmd->add_option("--decision-frames", decision_frames, "Frames between agent decisions");
        cmd->add_option("--t-min", t_min, "Minimum seconds an action is held");
        cmd->add_option("--t-max", t_max, "Maximum seconds an action is held");
    }

    void apply(ExperimentConfig& c) const {
        if (duration) c.sim.duration = *duration;
        if (gamma) c.hp.gamma = *gamma;
        if (lr) c.hp.lr = *lr;
        if (batch) c.hp.batch = *batch;
        if (buffer_capacity) c.hp.buffer_capacity = *buffer_capacity;
        if (target_sync_every) c.hp.target_sync_every = *target_sync_every;
        if (eps0) c.hp.eps0 = *eps0;
        if (eps_min) c.hp.eps_min = *eps_min;
        if (eps_decay) c.hp.eps_decay = *eps_decay;
        if (!hidden.empty()) c.hp.hidden = hidden;
        if (decision_frames) c.timing.decision_frames = *decision_frames;
        if (t_min) c.timing.t_min = *t_min;
        if (t_max) c.timing.t_max = *t_max;
    }
};

// Defaults, then the config file, then the environment, then flags.
ExperimentConfig base_config(const std::string& config_path) {
    ExperimentConfig c;
    if (!config_path.empty()) apply_config_file(config_path, c);
    apply_environment(c);
    return c;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traffic signal control: simulation, multi-agent DQN training and statistical comparison"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file of dotted keys (flags take precedence)")
        ->check(CLI::ExistingFile);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Run one episode and print its run record as JSON");
    std::string controller = "fixed";
    std::uint64_t sim_seed = 1;
    std::string sim_model, sim_trace, sim_out;
    Overrides sim_over;
    sim_cmd->add_option("--controller", controller, "fixed or marl")
        ->check(CLI::IsMember({"fixed", "marl"}));
    sim_cmd->add_option("--seed", sim_seed, "Spawn sequence seed");
    sim_over.add_duration(sim_cmd);
    sim_cmd->add_option("--model", sim_model, "Trained model file (required for marl)");
    sim_cmd->add_option("--trace", sim_trace, "Write one JSON line per frame to this file");
    sim_cmd->add_option("--out", sim_out, "Write the record here instead of stdout");

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one DQN agent per light and save the model");
    std::optional<int> episodes;
    std::optional<std::uint64_t> train_seed;
    std::string train_out, train_log;
    bool quiet = false;
    Overrides train_over;
    train_cmd->add_option("--episodes", episodes, "Training episodes")->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train_seed, "Seed for weights, exploration and episode worlds");
    train_cmd->add_option("--out", train_out, "Model file to write")->required();
    train_cmd->add_option("--log", train_log, "Per-episode CSV log (default: next to the model)");
    train_cmd->add_flag("--quiet", quiet, "No per-episode progress on stderr");
    train_over.add_duration(train_cmd);
    train_over.add_training(train_cmd);

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Evaluate fixed-time and MARL control over seeded runs");
    std::optional<int> runs;
    std::optional<std::uint64_t> base_seed;
    std::string exp_model, out_dir;
    unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
    Overrides exp_over;
    exp_cmd->add_option("--runs", runs, "Runs per controller")->check(CLI::PositiveNumber);
    exp_cmd->add_option("--base-seed", base_seed, "Seed of the first run (default: training seed + 10000)");
    exp_cmd->add_option("--model", exp_model, "Trained model file");
    exp_cmd->add_option("--out-dir", out_dir, "Directory for CSVs and reports");
    exp_cmd->add_option("--jobs", jobs, "Runs executed in parallel")->check(CLI::PositiveNumber);
    exp_over.add_duration(exp_cmd);

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Compare two stored runs CSVs");
    std::string fixed_csv, marl_csv, stats_json;
    double alpha = 0.05;
    stats_cmd->add_option("--fixed-csv", fixed_csv, "Fixed-time runs")->required();
    stats_cmd->add_option("--marl-csv", marl_csv, "MARL runs")->required();
    stats_cmd->add_option("--json", stats_json, "Also write the report as JSON to this path ('-' for stdout)");
    stats_cmd->add_option("--alpha", alpha, "Significance level")->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        auto config = base_config(config_path);

        if (*sim_cmd) {
            sim_over.apply(config);
            SimulateOptions opt;
            opt.controller = parse_controller(controller);
            opt.seed = sim_seed;
            if (!sim_model.empty()) opt.model = sim_model;
            if (!sim_trace.empty()) opt.trace = sim_trace;
            const auto record = cmd_simulate(config, opt);
            write_output(sim_out, to_json(record).dump(2) + "\n");
            std::cerr << "simulated " << config.sim.duration << " s in " << record.wall_seconds << " s\n";
        } else if (*train_cmd) {
            train_over.apply(config);
            if (episodes) config.episodes = *episodes;
            if (train_seed) config.train_seed = *train_seed;
            std::optional<std::filesystem::path> log;
            if (!train_log.empty()) log = train_log;
            const auto out = cmd_train(config, train_out, log, quiet ? nullptr : &std::cerr);
            std::cerr << "wrote " << out.model_path.string() << " and " << out.log_path.string() << "\n";
        } else if (*exp_cmd) {
            exp_over.apply(config);
            if (runs) config.runs = *runs;
            if (base_seed) config.base_seed = *base_seed;
            if (!exp_model.empty()) config.model_path = exp_model;
            if (!out_dir.empty()) config.out_dir = out_dir;
            const auto out = cmd_experiment(config, jobs);
            std::cout << stats::to_text(out.report);
            std::cerr << "results in " << config.out_dir.string() << "\n";
        } else if (*stats_cmd) {
            std::vector<std::string> warnings;
            const auto report = cmd_stats(fixed_csv, marl_csv, &warnings, alpha);
            for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
            if (stats_json != "-") std::cout << stats::to_text(report);
            if (!stats_json.empty()) write_output(stats_json, stats::to_json(report).dump(2) + "\n");
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kUsage;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kBadFormat;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kOk;
}
