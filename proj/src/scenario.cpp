#include "mycosim/scenario.hpp"

#include "text_util.hpp"

#include <json.hpp>

namespace mycosim {

namespace {

constexpr const char* kScenarioFormat = "myceliumsim/scenario/v1";

SimConfig config_from_json(const nlohmann::json& j) {
    SimConfig c;
    if (!j.is_object()) throw ParseError(0, "config", "expected an object");
    c.speed_mm_s = j.value("speed_mm_s", c.speed_mm_s);
    c.window_s = j.value("window_s", c.window_s);
    c.refractory_s = j.value("refractory_s", c.refractory_s);
    c.horizon_s = j.value("horizon_s", c.horizon_s);
    if (j.contains("rule")) {
        const auto text = j.at("rule").get<std::string>();
        const auto rule = parse_collision_rule(text);
        if (!rule) throw ParseError(0, "config.rule", "unknown collision rule '" + text + "'");
        c.rule = *rule;
    }
    return c;
}

nlohmann::json parse_json(const std::string& text, const char* what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, what, e.what());
    }
}

}  // namespace

SimConfig parse_sim_config(const std::string& json_text) {
    try {
        return config_from_json(parse_json(json_text, "config"));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, "config", e.what());
    }
}

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
    const auto j = parse_json(json_text, "scenario");
    if (!j.is_object() || j.value("format", std::string{}) != kScenarioFormat) {
        throw ParseError(0, "format", std::string("expected \"format\": \"") + kScenarioFormat + "\"");
    }
    try {
        std::filesystem::path net_path = j.at("network").get<std::string>();
        if (net_path.is_relative()) net_path = base_dir / net_path;
        Scenario s{net_path, load_network(net_path), {}, {}};
        if (j.contains("injections")) {
            for (const auto& inj : j.at("injections")) {
                Injection i;
                i.node = inj.at("node").get<NodeId>();
                i.time_s = inj.value("time_s", 0.0);
                i.amplitude_mV = inj.value("amplitude_mV", 1.0);
                s.injections.push_back(i);
            }
        }
        if (j.contains("config")) s.config = config_from_json(j.at("config"));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, "scenario", e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(detail::read_file(path), path.parent_path());
}

std::string format_scenario(const Scenario& s) {
    nlohmann::ordered_json j;
    j["format"] = kScenarioFormat;
    j["network"] = s.network_path.string();
    auto injections = nlohmann::ordered_json::array();
    for (const auto& i : s.injections) {
        injections.push_back({{"node", i.node}, {"time_s", i.time_s}, {"amplitude_mV", i.amplitude_mV}});
    }
    j["injections"] = injections;
    j["config"] = {{"speed_mm_s", s.config.speed_mm_s},
                   {"rule", std::string(to_string(s.config.rule))},
                   {"window_s", s.config.window_s},
                   {"refractory_s", s.config.refractory_s},
                   {"horizon_s", s.config.horizon_s}};
    return j.dump(2) + "\n";
}

ArrivalLog simulate(const Scenario& scenario) {
    SimState state(scenario.network);
    for (const auto& inj : scenario.injections) inject_spike(state, inj.node, inj.time_s, inj.amplitude_mV);
    return run(state, scenario.config);
}

}  // namespace mycosim
