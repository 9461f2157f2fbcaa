#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "json.hpp"
#include "tagirl/harness.hpp"

namespace tagirl {

using nlohmann::json;

namespace {

const std::vector<std::string> kKnownKeys = {
    "environment", "agent",       "hidden_layers",       "gamma",
    "sigma_v",     "eta",         "sigma_v_min",         "batch_size",
    "buffer_size", "horizon",     "normalize",           "total_steps",
    "eval_window", "seed",        "runs",                "output_dir",
    "checkpoint_interval",        "wall_time",           "chain"};

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!j.at(key).is_number_unsigned()) {
            throw ConfigError(std::string("config key '") + key +
                              "' must be a non-negative integer");
        }
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key +
                          "' has the wrong type: " + e.what());
    }
}

HiddenLayer parse_hidden(const json& item) {
    if (item.is_number_unsigned() || item.is_number_integer()) {
        const auto units = item.get<long long>();
        if (units <= 0) throw ConfigError("hidden layer width must be >= 1");
        return {static_cast<std::size_t>(units), Activation::relu};
    }
    if (!item.is_object() || !item.contains("units")) {
        throw ConfigError(
            "hidden_layers entries are widths or {\"units\", \"activation\"}");
    }
    HiddenLayer h;
    const auto units = item.at("units").get<long long>();
    if (units <= 0) throw ConfigError("hidden layer width must be >= 1");
    h.units = static_cast<std::size_t>(units);
    try {
        h.activation =
            activation_from_string(get_or<std::string>(item, "activation",
                                                       "relu"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return h;
}

}  // namespace

void RunConfig::validate() const {
    if (environment != "cartpole" && environment != "chain") {
        throw ConfigError("unknown environment '" + environment + "'");
    }
    if (agent != "replay" && agent != "nstep") {
        throw ConfigError("unknown agent '" + agent +
                          "' (expected replay or nstep)");
    }
    if (total_steps == 0) throw ConfigError("total_steps must be >= 1");
    if (eval_window == 0) throw ConfigError("eval_window must be >= 1");
    if (runs == 0) throw ConfigError("runs must be >= 1");
    if (chain.length < 2) throw ConfigError("chain length must be >= 2");
    for (const auto& h : hidden_layers) {
        if (h.units == 0) throw ConfigError("hidden layer width must be >= 1");
    }
    try {
        agent_config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) ==
            kKnownKeys.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    RunConfig c;
    c.agent = get_or<std::string>(j, "agent", c.agent);
    c.environment = get_or<std::string>(j, "environment", c.environment);
    const AgentConfig base = c.agent == "nstep" ? AgentConfig::nstep_defaults()
                                                : AgentConfig::replay_defaults();
    try {
        AgentConfig a = base;
        a.gamma = Discount(get_or<double>(j, "gamma", base.gamma.value()));
        a.schedule = NoiseSchedule(
            get_or<double>(j, "sigma_v", base.schedule.sigma_v_init()),
            get_or<double>(j, "eta", base.schedule.eta()),
            get_or<double>(j, "sigma_v_min", base.schedule.sigma_v_min()));
        a.batch_size = get_or<std::size_t>(j, "batch_size", base.batch_size);
        a.buffer_capacity =
            get_or<std::size_t>(j, "buffer_size", base.buffer_capacity);
        a.horizon = get_or<std::size_t>(j, "horizon", base.horizon);
        a.normalize = get_or<bool>(j, "normalize", base.normalize);
        c.agent_config = a;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    if (j.contains("hidden_layers")) {
        const json& layers = j.at("hidden_layers");
        if (!layers.is_array()) {
            throw ConfigError("hidden_layers must be an array");
        }
        c.hidden_layers.clear();
        for (const auto& item : layers) {
            c.hidden_layers.push_back(parse_hidden(item));
        }
    }
    if (j.contains("chain")) {
        const json& ch = j.at("chain");
        c.chain.length = get_or<std::size_t>(ch, "length", c.chain.length);
        c.chain.step_reward =
            get_or<double>(ch, "step_reward", c.chain.step_reward);
        c.chain.goal_reward =
            get_or<double>(ch, "goal_reward", c.chain.goal_reward);
    }
    c.total_steps = get_or<std::size_t>(j, "total_steps", c.total_steps);
    c.eval_window = get_or<std::size_t>(j, "eval_window", c.eval_window);
    c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
    c.runs = get_or<std::size_t>(j, "runs", c.runs);
    c.checkpoint_interval =
        get_or<std::size_t>(j, "checkpoint_interval", c.checkpoint_interval);
    c.wall_time = get_or<bool>(j, "wall_time", c.wall_time);
    if (j.contains("output_dir")) {
        c.output_dir = get_or<std::string>(j, "output_dir", "");
    } else {
        c.output_dir = default_output_root();
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

std::string dump_run_config(const RunConfig& c) {
    json layers = json::array();
    for (const auto& h : c.hidden_layers) {
        layers.push_back(
            {{"units", h.units}, {"activation", to_string(h.activation)}});
    }
    const AgentConfig& a = c.agent_config;
    json j = {
        {"environment", c.environment},
        {"agent", c.agent},
        {"hidden_layers", layers},
        {"gamma", a.gamma.value()},
        {"sigma_v", a.schedule.sigma_v_init()},
        {"eta", a.schedule.eta()},
        {"sigma_v_min", a.schedule.sigma_v_min()},
        {"batch_size", a.batch_size},
        {"buffer_size", a.buffer_capacity},
        {"horizon", a.horizon},
        {"normalize", a.normalize},
        {"total_steps", c.total_steps},
        {"eval_window", c.eval_window},
        {"seed", c.seed},
        {"runs", c.runs},
        {"output_dir", c.output_dir.string()},
        {"checkpoint_interval", c.checkpoint_interval},
        {"wall_time", c.wall_time},
        {"chain",
         {{"length", c.chain.length},
          {"step_reward", c.chain.step_reward},
          {"goal_reward", c.chain.goal_reward}}},
    };
    return j.dump(2) + "\n";
}

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("TAGIRL_OUT"); env && *env) {
        return env;
    }
    return "runs";
}

}  // namespace tagirl
