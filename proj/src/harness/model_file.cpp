#include "trafficrl/harness/model_file.hpp"

#include <fstream>

#include "trafficrl/control/constraints.hpp"
#include "trafficrl/control/features.hpp"
#include "trafficrl/errors.hpp"

namespace trafficrl::harness {

namespace {

nlohmann::ordered_json hp_json(const rl::Hyperparams& hp) {
    nlohmann::ordered_json j;
    j["gamma"] = hp.gamma;
    j["lr"] = hp.lr;
    j["batch"] = hp.batch;
    j["buffer_capacity"] = hp.buffer_capacity;
    j["target_sync_every"] = hp.target_sync_every;
    j["eps0"] = hp.eps0;
    j["eps_min"] = hp.eps_min;
    j["eps_decay"] = hp.eps_decay;
    j["hidden"] = hp.hidden;
    return j;
}

rl::Hyperparams hp_from_json(const nlohmann::json& j) {
    rl::Hyperparams hp;
    hp.gamma = j.at("gamma").get<double>();
    hp.lr = j.at("lr").get<double>();
    hp.batch = j.at("batch").get<std::size_t>();
    hp.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
    hp.target_sync_every = j.at("target_sync_every").get<long>();
    hp.eps0 = j.at("eps0").get<double>();
    hp.eps_min = j.at("eps_min").get<double>();
    hp.eps_decay = j.at("eps_decay").get<double>();
    hp.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    return hp;
}

nlohmann::ordered_json network_json(const rl::QNetwork& net) {
    nlohmann::ordered_json j;
    j["dims"] = net.dims();
    auto layers = nlohmann::ordered_json::array();
    for (const auto& l : net.layers()) {
        nlohmann::ordered_json lj;
        lj["inputs"] = l.inputs;
        lj["outputs"] = l.outputs;
        lj["weights"] = l.weights;
        lj["biases"] = l.biases;
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    return j;
}

rl::QNetwork network_from_json(const nlohmann::json& j, std::size_t agent) {
    const auto where = "agent " + std::to_string(agent) + ": ";
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    rl::QNetwork net(dims);
    const auto& layers = j.at("layers");
    if (!layers.is_array() || layers.size() != net.layers().size()) {
        throw FormatError(where + "layer count does not match dims");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& layer = net.layers()[l];
        const auto& lj = layers[l];
        if (lj.at("inputs").get<std::size_t>() != layer.inputs || lj.at("outputs").get<std::size_t>() != layer.outputs) {
            throw FormatError(where + "layer " + std::to_string(l) + " shape does not match dims");
        }
        auto weights = lj.at("weights").get<std::vector<double>>();
        auto biases = lj.at("biases").get<std::vector<double>>();
        if (weights.size() != layer.weights.size() || biases.size() != layer.biases.size()) {
            throw FormatError(where + "layer " + std::to_string(l) + " has " + std::to_string(weights.size()) +
                              " weights and " + std::to_string(biases.size()) + " biases, expected " +
                              std::to_string(layer.weights.size()) + " and " + std::to_string(layer.biases.size()));
        }
        layer.weights = std::move(weights);
        layer.biases = std::move(biases);
    }
    if (!net.all_finite()) throw FormatError(where + "non-finite parameter");
    return net;
}

}  // namespace

nlohmann::ordered_json feature_layout(const sim::SimConfig& sim) {
    std::vector<sim::TrafficLight> lights;
    for (std::size_t i = 0; i < sim.light_positions.size(); ++i) {
        lights.push_back({static_cast<int>(i), sim.light_positions[i], sim::LightPhase::Green, 0});
    }
    nlohmann::ordered_json j;
    j["features_per_light"] = control::kFeaturesPerLight;
    j["light_block_order"] = control::feature_light_order(lights);
    j["blocks"] = {"queue[N,S,E,W]", "avg_distance[N,S,E,W]", "moving_ratio[N,S,E,W]",
                   "offset[Nx,Ny,Sx,Sy,Ex,Ey,Wx,Wy]"};
    j["queue_normalizer"] = control::kQueueNormalizer;
    j["detection_radius"] = sim.detection_radius;
    return j;
}

ModelFile make_model_file(const rl::TrainingResult& result, const sim::SimConfig& sim, int episodes,
                          std::uint64_t seed, const rl::Hyperparams& hp, const rl::ControlTiming& timing) {
    ModelFile m;
    m.light_count = sim.light_count();
    m.light_positions = sim.light_positions;
    m.detection_radius = sim.detection_radius;
    for (const auto& agent : result.agents) m.networks.push_back(agent.online);
    m.training = {episodes, seed, hp, timing, sim.duration, result.constraint_violations, result.decision_ticks};
    return m;
}

nlohmann::ordered_json to_json(const ModelFile& m) {
    nlohmann::ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["light_count"] = m.light_count;
    auto lights = nlohmann::ordered_json::array();
    for (const auto& p : m.light_positions) lights.push_back({p.x, p.y});
    j["light_positions"] = std::move(lights);

    sim::SimConfig sim;
    sim.light_positions = m.light_positions;
    sim.detection_radius = m.detection_radius;
    j["feature_layout"] = feature_layout(sim);
    j["input_size"] = control::feature_size(static_cast<std::size_t>(m.light_count));
    j["action_count"] = control::kActionCount;

    nlohmann::ordered_json t;
    t["episodes"] = m.training.episodes;
    t["seed"] = m.training.seed;
    t["episode_duration"] = m.training.episode_duration;
    t["hyperparams"] = hp_json(m.training.hp);
    t["decision_frames"] = m.training.timing.decision_frames;
    t["t_min"] = m.training.timing.t_min;
    t["t_max"] = m.training.timing.t_max;
    t["constraint_violations"] = m.training.constraint_violations;
    t["decision_ticks"] = m.training.decision_ticks;
    j["training"] = std::move(t);

    auto agents = nlohmann::ordered_json::array();
    for (const auto& net : m.networks) agents.push_back(network_json(net));
    j["agents"] = std::move(agents);
    return j;
}

ModelFile model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", std::string{}) != kModelFormat) {
        throw FormatError(std::string("not a model file (expected format '") + kModelFormat + "')");
    }
    const int version = j.value("version", -1);
    if (version != kModelVersion) {
        throw FormatError("unsupported model file version " + std::to_string(version) + " (this build reads version " +
                          std::to_string(kModelVersion) + ")");
    }
    try {
        ModelFile m;
        m.light_count = j.at("light_count").get<int>();
        for (const auto& p : j.at("light_positions")) m.light_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        m.detection_radius = j.at("feature_layout").at("detection_radius").get<double>();
        if (static_cast<int>(m.light_positions.size()) != m.light_count) {
            throw FormatError("light_positions has " + std::to_string(m.light_positions.size()) + " entries for " +
                              std::to_string(m.light_count) + " lights");
        }
        const auto& t = j.at("training");
        m.training.episodes = t.at("episodes").get<int>();
        m.training.seed = t.at("seed").get<std::uint64_t>();
        m.training.episode_duration = t.at("episode_duration").get<double>();
        m.training.hp = hp_from_json(t.at("hyperparams"));
        m.training.timing.decision_frames = t.at("decision_frames").get<int>();
        m.training.timing.t_min = t.at("t_min").get<double>();
        m.training.timing.t_max = t.at("t_max").get<double>();
        m.training.constraint_violations = t.at("constraint_violations").get<long>();
        m.training.decision_ticks = t.at("decision_ticks").get<long>();

        const auto input = control::feature_size(static_cast<std::size_t>(m.light_count));
        const auto& agents = j.at("agents");
        if (!agents.is_array() || static_cast<int>(agents.size()) != m.light_count) {
            throw FormatError("expected one network per light (" + std::to_string(m.light_count) + ")");
        }
        for (std::size_t i = 0; i < agents.size(); ++i) {
            auto net = network_from_json(agents[i], i);
            if (net.input_size() != input || net.output_size() != static_cast<std::size_t>(control::kActionCount)) {
                throw FormatError("agent " + std::to_string(i) + " maps " + std::to_string(net.input_size()) + " -> " +
                                  std::to_string(net.output_size()) + ", expected " + std::to_string(input) + " -> " +
                                  std::to_string(control::kActionCount));
            }
            m.networks.push_back(std::move(net));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed model file (version ") + std::to_string(version) + "): " + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file " + path.string());
    out << to_json(model).dump() << '\n';
    if (!out) throw IoError("write failed for model file " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read model file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("model file " + path.string() + " is not valid JSON: " + e.what());
    }
    return model_from_json(j);
}

void check_compatible(const ModelFile& model, const sim::SimConfig& sim) {
    if (model.light_count != sim.light_count()) {
        throw ConfigError("model was trained for " + std::to_string(model.light_count) + " lights, config has " +
                          std::to_string(sim.light_count()));
    }
    if (!(model.light_positions == sim.light_positions)) {
        throw ConfigError("model light positions differ from the configured lights");
    }
    if (model.detection_radius != sim.detection_radius) {
        throw ConfigError("model detection radius " + std::to_string(model.detection_radius) +
                          " differs from the configured " + std::to_string(sim.detection_radius));
    }
}

}  // namespace trafficrl::harness
