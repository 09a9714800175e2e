#include "jumpstats/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace jumpstats {

namespace {

using nlohmann::json;

const std::set<std::string> kKnownKeys = {
    "omega",   "gamma_w",    "gamma_m",  "n_avg",   "dt",
    "steps",   "trajectories", "seed",   "mode",    "out",
    "decimate", "workers",   "allow_large_n_avg",   "s_max",
    "s_points", "fock_dt",   "fock_n_max"};

double require_number(const json& j, const std::string& key) {
    if (!j.is_number()) throw std::invalid_argument("config: key '" + key + "' must be a number");
    return j.get<double>();
}

long long require_integer(const json& j, const std::string& key) {
    if (!j.is_number_integer()) {
        throw std::invalid_argument("config: key '" + key + "' must be an integer");
    }
    return j.get<long long>();
}

RunConfig from_json(const json& root) {
    if (!root.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    for (const auto& [key, value] : root.items()) {
        (void)value;
        if (!kKnownKeys.count(key)) {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }

    RunConfig cfg;
    if (root.contains("omega")) cfg.params.omega = require_number(root["omega"], "omega");
    if (root.contains("gamma_w")) cfg.params.gamma_w = require_number(root["gamma_w"], "gamma_w");
    if (root.contains("n_avg")) cfg.params.n_avg = require_number(root["n_avg"], "n_avg");
    if (root.contains("dt")) cfg.params.dt = require_number(root["dt"], "dt");
    if (root.contains("steps")) {
        cfg.params.steps = static_cast<int>(require_integer(root["steps"], "steps"));
    }
    if (root.contains("trajectories")) {
        cfg.params.trajectories = require_integer(root["trajectories"], "trajectories");
    }
    if (root.contains("seed")) {
        if (!root["seed"].is_number_integer() && !root["seed"].is_number_unsigned()) {
            throw std::invalid_argument("config: key 'seed' must be an integer");
        }
        cfg.params.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("mode")) {
        const std::string mode = root["mode"].is_string()
                                     ? root["mode"].get<std::string>()
                                     : throw std::invalid_argument("config: 'mode' must be a string");
        if (mode == "semi") {
            cfg.params.mode = SpinMode::semi_conditional;
        } else if (mode == "conditional") {
            cfg.params.mode = SpinMode::conditional;
        } else {
            throw std::invalid_argument("config: 'mode' must be \"semi\" or \"conditional\", got \"" +
                                        mode + "\"");
        }
    }
    if (root.contains("gamma_m")) {
        const json& g = root["gamma_m"];
        if (g.is_number()) {
            cfg.gamma_m = {g.get<double>()};
        } else if (g.is_array() && !g.empty()) {
            cfg.gamma_m.clear();
            for (const auto& v : g) cfg.gamma_m.push_back(require_number(v, "gamma_m"));
        } else {
            throw std::invalid_argument("config: 'gamma_m' must be a number or non-empty array");
        }
    }
    if (root.contains("out")) {
        if (!root["out"].is_string()) throw std::invalid_argument("config: 'out' must be a string");
        cfg.out = root["out"].get<std::string>();
    }
    if (root.contains("decimate")) {
        cfg.decimate = static_cast<int>(require_integer(root["decimate"], "decimate"));
    }
    if (root.contains("workers")) {
        cfg.workers = static_cast<int>(require_integer(root["workers"], "workers"));
    }
    if (root.contains("allow_large_n_avg")) {
        if (!root["allow_large_n_avg"].is_boolean()) {
            throw std::invalid_argument("config: 'allow_large_n_avg' must be a boolean");
        }
        cfg.allow_large_n_avg = root["allow_large_n_avg"].get<bool>();
    }
    if (root.contains("s_max")) cfg.s_max = require_number(root["s_max"], "s_max");
    if (root.contains("s_points")) {
        cfg.s_points = static_cast<int>(require_integer(root["s_points"], "s_points"));
    }
    if (root.contains("fock_dt")) cfg.fock_dt = require_number(root["fock_dt"], "fock_dt");
    if (root.contains("fock_n_max")) {
        cfg.fock_n_max = static_cast<int>(require_integer(root["fock_n_max"], "fock_n_max"));
    }
    return cfg;
}

} // namespace

void RunConfig::validate() const {
    ModelParams probe = params;
    if (gamma_m.empty()) throw std::invalid_argument("config: gamma_m sweep must be non-empty");
    for (std::size_t i = 0; i + 1 < gamma_m.size(); ++i) {
        if (!(gamma_m[i] < gamma_m[i + 1])) {
            throw std::invalid_argument("config: gamma_m sweep values must be strictly increasing");
        }
    }
    for (double g : gamma_m) {
        probe.gamma_m = g;
        probe.validate();
    }
    if (params.exceeds_default_occupation() && !allow_large_n_avg) {
        throw std::invalid_argument(
            "config: n_avg = " + std::to_string(params.n_avg) +
            " exceeds 1; the closed-form comparison degrades there — set allow_large_n_avg "
            "to override");
    }
    if (decimate < 1) throw std::invalid_argument("config: decimate must be >= 1");
    if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");
    if (!(s_max > 0.0)) throw std::invalid_argument("config: s_max must be > 0");
    if (s_points < 2) throw std::invalid_argument("config: s_points must be >= 2");
    if (!(fock_dt > 0.0)) throw std::invalid_argument("config: fock_dt must be > 0");
    if (fock_n_max < 0) throw std::invalid_argument("config: fock_n_max must be >= 0");
}

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw std::invalid_argument(std::string("config: JSON parse error: ") + err.what());
    }
    return from_json(root);
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

} // namespace jumpstats
