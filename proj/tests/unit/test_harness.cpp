#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "reference_tables.hpp"
#include "test_util.hpp"
#include "trafficrl/control/features.hpp"
#include "trafficrl/errors.hpp"
#include "trafficrl/harness/commands.hpp"
#include "trafficrl/harness/config.hpp"
#include "trafficrl/harness/model_file.hpp"
#include "trafficrl/harness/records.hpp"
#include "trafficrl/rl/dqn.hpp"

using namespace trafficrl;
using namespace trafficrl::harness;
using testutil::TempDir;

namespace {

// Small, quick configuration for tests that need a trained model.
ExperimentConfig small_config() {
    ExperimentConfig c;
    c.sim.duration = 10.0;
    c.hp.hidden = {16};
    c.episodes = 1;
    c.train_seed = 5;
    return c;
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

}  // namespace

TEST_SUITE("config") {
    TEST_CASE("dotted keys override defaults") {
        ExperimentConfig c;
        apply_config_json(nlohmann::json::parse(R"({"sim.duration": 120, "hp.lr": 0.0005, "hp.hidden": [32, 16],
            "experiment.runs": 5, "experiment.base_seed": 77, "train.seed": 3, "control.t_max": 8.5})"),
                          c);
        CHECK(c.sim.duration == 120.0);
        CHECK(c.hp.lr == 0.0005);
        CHECK(c.hp.hidden == std::vector<std::size_t>{32, 16});
        CHECK(c.runs == 5);
        CHECK(c.run_seed(0, 3) == 77);
        CHECK(c.run_seed(4, 3) == 81);
        CHECK(c.train_seed == 3);
        CHECK(c.timing.t_max == 8.5);
    }

    TEST_CASE("evaluation seeds default to training seed + 10000") {
        ExperimentConfig c;
        CHECK(c.run_seed(0, 3) == 10003);
        CHECK(c.run_seed(19, 3) == 10022);
    }

    TEST_CASE("unknown keys and wrong types are rejected by name") {
        ExperimentConfig c;
        CHECK_THROWS_WITH_AS(apply_config_json(nlohmann::json::parse(R"({"sim.durration": 5})"), c),
                             doctest::Contains("sim.durration"), ConfigError);
        CHECK_THROWS_WITH_AS(apply_config_json(nlohmann::json::parse(R"({"hp.batch": "big"})"), c),
                             doctest::Contains("hp.batch"), ConfigError);
        CHECK_THROWS_AS(apply_config_json(nlohmann::json::parse(R"({"hp.batch": -3})"), c), ConfigError);
        CHECK_THROWS_AS(apply_config_json(nlohmann::json::parse(R"([1, 2])"), c), ConfigError);
    }

    TEST_CASE("exported config reads back to the same values") {
        ExperimentConfig c;
        c.sim.duration = 42.0;
        c.hp.hidden = {7, 5};
        c.base_seed = 9;
        const auto j = config_to_json(c);
        ExperimentConfig d;
        apply_config_json(nlohmann::json::parse(j.dump()), d);
        CHECK(config_to_json(d) == j);
    }

    TEST_CASE("config file and environment override") {
        TempDir tmp("config");
        testutil::write_file(tmp / "c.json", R"({"experiment.out_dir": "from_file", "sim.fps": 30})");
        ExperimentConfig c;
        apply_config_file(tmp / "c.json", c);
        CHECK(c.out_dir == "from_file");
        CHECK(c.sim.fps == 30);
        ::setenv(kOutDirEnv, "from_env", 1);
        apply_environment(c);
        ::unsetenv(kOutDirEnv);
        CHECK(c.out_dir == "from_env");

        testutil::write_file(tmp / "bad.json", "{not json");
        CHECK_THROWS_AS(apply_config_file(tmp / "bad.json", c), FormatError);
    }

    TEST_CASE("validation") {
        ExperimentConfig c;
        c.runs = 0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = ExperimentConfig{};
        c.sim.fps = -1;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        CHECK_NOTHROW(ExperimentConfig{}.validate());
    }
}

TEST_SUITE("run records") {
    TEST_CASE("record mirrors run metrics and leaves wall time out of JSON") {
        sim::RunMetrics m{1146, 5263.82, 4.3865, 1200};
        const auto r = RunRecord::from_metrics(ControllerKind::Marl, 12, m, 3.5);
        CHECK(r.vehicles_passed == 1146);
        CHECK(r.total_wait == 5263.82);
        CHECK(r.mean_wait == 4.3865);
        CHECK(r.spawned == 1200);
        const auto j = to_json(r);
        CHECK(j["controller"] == "marl");
        CHECK(j["seed"] == 12);
        CHECK_FALSE(j.contains("wall_seconds"));
        CHECK(j.dump().find("3.5") == std::string::npos);
    }

    TEST_CASE("controller names") {
        CHECK(parse_controller("fixed") == ControllerKind::Fixed);
        CHECK(parse_controller("marl") == ControllerKind::Marl);
        CHECK_THROWS_AS(parse_controller("adaptive"), UsageError);
    }

    TEST_CASE("shortest round-trip number formatting") {
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(5263.82) == "5263.82");
        CHECK(format_double(1146.0) == "1146");
        CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
        for (double x : {1e-300, 123456.789, -0.0625, 4050.866666666667}) {
            CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
        }
    }

    TEST_CASE("CSV writes the fixed header and reads back exactly") {
        std::vector<RunRecord> recs;
        for (int i = 0; i < 4; ++i) {
            recs.push_back(RunRecord{ControllerKind::Fixed, std::uint64_t(i), 1140 + i, 5000.0 + i / 3.0, 0.0, 1200, 0});
        }
        std::stringstream ss;
        write_runs_csv(ss, recs);
        const auto text = ss.str();
        CHECK(text.rfind("run,vehicles_passed,wait_time_s\n1,1140,5000\n", 0) == 0);
        const auto table = read_runs_csv(ss);
        REQUIRE(table.vehicles_passed.size() == 4);
        for (int i = 0; i < 4; ++i) {
            CHECK(table.run[i] == i + 1);
            CHECK(table.vehicles_passed[i] == 1140 + i);
            CHECK(table.wait_time[i] == 5000.0 + i / 3.0);
        }
        CHECK(table.warnings.empty());
    }

    TEST_CASE("extra columns are ignored with a warning") {
        std::istringstream in("run,vehicles_passed,notes,wait_time_s\n1,1146,ok,5263.8\n2,1147,,5200\n");
        const auto t = read_runs_csv(in, "x.csv");
        CHECK(t.wait_time == std::vector<double>{5263.8, 5200.0});
        REQUIRE(t.warnings.size() == 1);
        CHECK(t.warnings[0].find("notes") != std::string::npos);
    }

    TEST_CASE("malformed rows cite the line number") {
        std::istringstream bad("run,vehicles_passed,wait_time_s\n1,1146,5263.8\n2,11x7,5200\n");
        CHECK_THROWS_WITH_AS(read_runs_csv(bad, "x.csv"), doctest::Contains("x.csv:3"), FormatError);
        std::istringstream short_row("run,vehicles_passed,wait_time_s\n1,1146\n");
        CHECK_THROWS_WITH_AS(read_runs_csv(short_row, "y.csv"), doctest::Contains("y.csv:2"), FormatError);
        std::istringstream no_header("a,b\n1,2\n");
        CHECK_THROWS_AS(read_runs_csv(no_header, "z.csv"), FormatError);
        std::istringstream empty("");
        CHECK_THROWS_AS(read_runs_csv(empty, "e.csv"), FormatError);
    }

    TEST_CASE("bundled reference tables load intact") {
        const auto fixed = read_runs_csv(testutil::fixture("reference_fixed_runs.csv"));
        const auto marl = read_runs_csv(testutil::fixture("reference_marl_runs.csv"));
        CHECK(fixed.vehicles_passed == reference::kFixedVehicles);
        CHECK(fixed.wait_time == reference::kFixedWait);
        CHECK(marl.vehicles_passed == reference::kMarlVehicles);
        CHECK(marl.wait_time == reference::kMarlWait);
    }
}

TEST_SUITE("model file") {
    TEST_CASE("train, save, load: identical parameters and greedy actions") {
        TempDir tmp("model");
        const auto cfg = small_config();
        const auto out = cmd_train(cfg, tmp / "m.json");
        CHECK(out.model.light_count == 4);
        REQUIRE(out.model.networks.size() == 4);
        for (const auto& n : out.model.networks) CHECK(n.input_size() == 80);
        CHECK(out.log.size() == 1);
        CHECK(out.log_path == tmp / "m.training.csv");
        const auto log_text = testutil::read_file(out.log_path);
        CHECK(log_text.rfind("episode,mean_reward,mean_loss,epsilon\n", 0) == 0);
        CHECK(count_lines(log_text) == 2);

        const auto loaded = load_model(tmp / "m.json");
        CHECK(loaded.networks == out.model.networks);
        CHECK(loaded.training.seed == 5);
        CHECK(loaded.training.hp.hidden == std::vector<std::size_t>{16});
        CHECK(loaded.training.timing.decision_frames == 6);
        CHECK(loaded.training.constraint_violations == 0);
        CHECK(loaded.training.decision_ticks == 100);

        Rng rng(1);
        int same = 0;
        for (int i = 0; i < 100; ++i) {
            std::vector<double> x(80);
            for (auto& v : x) v = rng.uniform(-1, 1);
            for (std::size_t a = 0; a < 4; ++a) {
                same += rl::argmax(loaded.networks[a].forward(x)) == rl::argmax(out.model.networks[a].forward(x));
            }
        }
        CHECK(same == 400);

        // Saving the loaded model reproduces the file byte for byte.
        save_model(tmp / "again.json", loaded);
        CHECK(testutil::read_file(tmp / "again.json") == testutil::read_file(tmp / "m.json"));
    }

    TEST_CASE("training log row count matches episodes") {
        TempDir tmp("log");
        auto cfg = small_config();
        cfg.episodes = 3;
        cfg.sim.duration = 5.0;
        const auto out = cmd_train(cfg, tmp / "m.json", tmp / "log.csv");
        CHECK(count_lines(testutil::read_file(tmp / "log.csv")) == 4);
    }

    TEST_CASE("version and shape checks") {
        TempDir tmp("badmodel");
        const auto out = cmd_train(small_config(), tmp / "m.json");
        auto j = nlohmann::json::parse(testutil::read_file(tmp / "m.json"));

        auto wrong_version = j;
        wrong_version["version"] = 99;
        CHECK_THROWS_WITH_AS(model_from_json(wrong_version), doctest::Contains("version 99"), FormatError);

        auto wrong_format = j;
        wrong_format["format"] = "something-else";
        CHECK_THROWS_AS(model_from_json(wrong_format), FormatError);

        auto short_weights = j;
        short_weights["agents"][1]["layers"][0]["weights"].erase(0);
        CHECK_THROWS_WITH_AS(model_from_json(short_weights), doctest::Contains("agent 1"), FormatError);

        auto missing_agent = j;
        missing_agent["agents"].erase(3);
        CHECK_THROWS_AS(model_from_json(missing_agent), FormatError);

        testutil::write_file(tmp / "garbage.json", "{{{");
        CHECK_THROWS_AS(load_model(tmp / "garbage.json"), FormatError);
        CHECK_THROWS_AS(load_model(tmp / "missing.json"), FormatError);
    }

    TEST_CASE("loading checks the model against the configured lights") {
        TempDir tmp("compat");
        const auto out = cmd_train(small_config(), tmp / "m.json");
        sim::SimConfig three;
        three.light_positions.pop_back();
        CHECK_THROWS_AS(check_compatible(out.model, three), ConfigError);
        sim::SimConfig radius;
        radius.detection_radius = 100.0;
        CHECK_THROWS_AS(check_compatible(out.model, radius), ConfigError);
        CHECK_NOTHROW(check_compatible(out.model, sim::SimConfig{}));
    }

    TEST_CASE("unwritable output fails before training") {
        auto cfg = small_config();
        cfg.sim.duration = 600.0;
        cfg.episodes = 50;
        CHECK_THROWS_AS(cmd_train(cfg, "/nonexistent_dir_for_tests/m.json"), IoError);
    }
}

TEST_SUITE("commands") {
    TEST_CASE("fixed simulate, seed 1: 1200 spawns and reproducible output") {
        ExperimentConfig cfg;
        SimulateOptions opt;
        opt.seed = 1;
        const auto a = cmd_simulate(cfg, opt);
        const auto b = cmd_simulate(cfg, opt);
        CHECK(a.spawned == 1200);
        CHECK(to_json(a).dump() == to_json(b).dump());
    }

    TEST_CASE("marl without a model is a usage error") {
        ExperimentConfig cfg;
        SimulateOptions opt;
        opt.controller = ControllerKind::Marl;
        CHECK_THROWS_AS(cmd_simulate(cfg, opt), UsageError);
    }

    TEST_CASE("trace has one record per frame") {
        TempDir tmp("trace");
        ExperimentConfig cfg;
        cfg.sim.duration = 5.0;
        SimulateOptions opt;
        opt.trace = tmp / "t.jsonl";
        const auto rec = cmd_simulate(cfg, opt);
        std::istringstream lines(testutil::read_file(tmp / "t.jsonl"));
        std::string line;
        long frames = 0, exits = 0;
        while (std::getline(lines, line)) {
            const auto j = nlohmann::json::parse(line);
            CHECK(j["frame"] == frames);
            CHECK(j["phases"].size() == 4);
            CHECK(j.contains("vehicles"));
            CHECK(j["crossings"].is_array());
            exits += j["exits"].get<long>();
            ++frames;
        }
        CHECK(frames == 300);
        CHECK(exits == rec.vehicles_passed);
    }

    TEST_CASE("marl simulate with a model") {
        TempDir tmp("marlsim");
        cmd_train(small_config(), tmp / "m.json");
        ExperimentConfig cfg;
        cfg.sim.duration = 30.0;
        SimulateOptions opt;
        opt.controller = ControllerKind::Marl;
        opt.model = tmp / "m.json";
        opt.seed = 4;
        const auto a = cmd_simulate(cfg, opt);
        const auto b = cmd_simulate(cfg, opt);
        CHECK(a.spawned == 60);
        CHECK(to_json(a).dump() == to_json(b).dump());
    }

    TEST_CASE("experiment writes ordered, reproducible outputs") {
        TempDir tmp("exp");
        cmd_train(small_config(), tmp / "m.json");
        ExperimentConfig cfg;
        cfg.sim.duration = 30.0;
        cfg.runs = 4;
        cfg.model_path = tmp / "m.json";
        cfg.out_dir = tmp / "a";
        const auto first = cmd_experiment(cfg, 2);
        REQUIRE(first.fixed.size() == 4);
        for (int k = 0; k < 4; ++k) {
            CHECK(first.fixed[k].seed == 10005u + k);
            CHECK(first.marl[k].seed == 10005u + k);
            CHECK(first.marl[k].controller == ControllerKind::Marl);
        }
        CHECK(count_lines(testutil::read_file(tmp / "a" / kFixedRunsFile)) == 5);
        CHECK(count_lines(testutil::read_file(tmp / "a" / kMarlRunsFile)) == 5);
        const auto report = nlohmann::json::parse(testutil::read_file(tmp / "a" / kReportJsonFile));
        CHECK(report["metrics"].size() == 2);
        CHECK(report["alpha"] == 0.05);
        CHECK(std::filesystem::exists(tmp / "a" / kReportTextFile));
        CHECK(std::filesystem::exists(tmp / "a" / kExperimentLogFile));

        cfg.out_dir = tmp / "b";
        cmd_experiment(cfg, 1);
        for (const char* f : {kFixedRunsFile, kMarlRunsFile, kRecordsFile, kReportJsonFile, kReportTextFile}) {
            CHECK(testutil::read_file(tmp / "a" / f) == testutil::read_file(tmp / "b" / f));
        }

        // Seed isolation: a smaller batch reproduces the leading records.
        cfg.runs = 3;
        cfg.out_dir = tmp / "c";
        const auto fewer = cmd_experiment(cfg, 1);
        for (int k = 0; k < 3; ++k) {
            CHECK(to_json(fewer.fixed[k]).dump() == to_json(first.fixed[k]).dump());
            CHECK(to_json(fewer.marl[k]).dump() == to_json(first.marl[k]).dump());
        }
    }

    TEST_CASE("experiment without a model") {
        TempDir tmp("nomodel");
        ExperimentConfig cfg;
        cfg.out_dir = tmp.path();
        CHECK_THROWS_AS(cmd_experiment(cfg), UsageError);
    }

    TEST_CASE("stats on the reference tables") {
        std::vector<std::string> warnings;
        const auto report = cmd_stats(testutil::fixture("reference_fixed_runs.csv"),
                                      testutil::fixture("reference_marl_runs.csv"), &warnings);
        CHECK(warnings.empty());
        CHECK(report.metrics[0].test_used == "student");
        CHECK(std::abs(report.metrics[0].test.t - 14.96) <= 0.01);
        CHECK(report.metrics[1].test_used == "welch");
        CHECK(std::abs(report.metrics[1].test.t + 209.11) <= 0.05);
    }

    TEST_CASE("stats with two rows is a sample-size error") {
        TempDir tmp("tiny");
        testutil::write_file(tmp / "f.csv", "run,vehicles_passed,wait_time_s\n1,1146,5263\n2,1147,5270\n");
        CHECK_THROWS_WITH_AS(cmd_stats(tmp / "f.csv", testutil::fixture("reference_marl_runs.csv")),
                             doctest::Contains("at least 3"), std::invalid_argument);
    }
}

TEST_SUITE("command line") {
    TEST_CASE("simulate prints the same record from two processes") {
        TempDir tmp("cli_sim");
        const auto cmd = testutil::cli() + " simulate --controller fixed --seed 3 --duration 60";
        const auto a = testutil::run_command(cmd, tmp.path());
        const auto b = testutil::run_command(cmd, tmp.path());
        CHECK(a.exit_code == 0);
        CHECK(a.out == b.out);
        const auto j = nlohmann::json::parse(a.out);
        CHECK(j["spawned"] == 120);
        CHECK(j["seed"] == 3);
    }

    TEST_CASE("marl without a model exits with a usage error and no output") {
        TempDir tmp("cli_usage");
        const auto r = testutil::run_command(testutil::cli() + " simulate --controller marl --seed 1", tmp.path());
        CHECK(r.exit_code == 2);
        CHECK(r.out.empty());
        CHECK(r.err.find("--model") != std::string::npos);
    }

    TEST_CASE("unknown flags and missing subcommands are usage errors") {
        TempDir tmp("cli_flags");
        CHECK(testutil::run_command(testutil::cli() + " simulate --bogus", tmp.path()).exit_code == 2);
        CHECK(testutil::run_command(testutil::cli(), tmp.path()).exit_code == 2);
        CHECK(testutil::run_command(testutil::cli() + " simulate --seed x", tmp.path()).exit_code == 2);
        CHECK(testutil::run_command(testutil::cli() + " --help", tmp.path()).exit_code == 0);
    }

    TEST_CASE("unreadable model is a format error naming the version") {
        TempDir tmp("cli_model");
        testutil::write_file(tmp / "m.json", R"({"format": "trafficrl-model", "version": 7})");
        const auto r = testutil::run_command(
            testutil::cli() + " simulate --controller marl --model " + (tmp / "m.json").string(), tmp.path());
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("version 7") != std::string::npos);
    }

    TEST_CASE("stats subcommand on the fixtures") {
        TempDir tmp("cli_stats");
        const auto r = testutil::run_command(
            testutil::cli() + " stats --fixed-csv " + testutil::fixture("reference_fixed_runs.csv").string() +
                " --marl-csv " + testutil::fixture("reference_marl_runs.csv").string() + " --json " +
                (tmp / "r.json").string(),
            tmp.path());
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("Welch") != std::string::npos);
        const auto j = nlohmann::json::parse(testutil::read_file(tmp / "r.json"));
        CHECK(j["metrics"][0]["t_test"]["test"] == "student");
    }

    TEST_CASE("malformed CSV exits with a format error and line number") {
        TempDir tmp("cli_csv");
        testutil::write_file(tmp / "bad.csv", "run,vehicles_passed,wait_time_s\n1,1146,5263\n2,abc,5270\n");
        const auto r = testutil::run_command(testutil::cli() + " stats --fixed-csv " + (tmp / "bad.csv").string() +
                                                 " --marl-csv " +
                                                 testutil::fixture("reference_marl_runs.csv").string(),
                                             tmp.path());
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("bad.csv:3") != std::string::npos);
    }

    TEST_CASE("train rejects an unwritable output path quickly") {
        TempDir tmp("cli_train");
        const auto r = testutil::run_command(
            testutil::cli() + " train --episodes 20 --out /nonexistent_dir_for_tests/m.json", tmp.path());
        CHECK(r.exit_code == 4);
    }

    TEST_CASE("unknown config key") {
        TempDir tmp("cli_cfg");
        testutil::write_file(tmp / "c.json", R"({"sim.speed": 3})");
        const auto r = testutil::run_command(
            testutil::cli() + " --config " + (tmp / "c.json").string() + " simulate", tmp.path());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("sim.speed") != std::string::npos);
    }
}
