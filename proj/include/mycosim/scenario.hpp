#pragma once

#include "mycosim/network.hpp"
#include "mycosim/spike_engine.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace mycosim {

struct Injection {
    NodeId node = 0;
    double time_s = 0.0;
    double amplitude_mV = 1.0;
};

/**
 * JSON document tagged `"format": "myceliumsim/scenario/v1"`:
 *
 *     { "format": "myceliumsim/scenario/v1",
 *       "network": "net.txt",
 *       "injections": [ {"node": 0, "time_s": 0, "amplitude_mV": 1.0} ],
 *       "config": { "speed_mm_s": 0.5, "rule": "annihilate", "window_s": 1.0,
 *                   "refractory_s": 120, "horizon_s": 3600 } }
 *
 * A relative network path is resolved against the scenario file's directory.
 * Missing config keys take the SimConfig defaults.
 */
struct Scenario {
    std::filesystem::path network_path;
    MyceliumNetwork network;
    std::vector<Injection> injections;
    SimConfig config;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir);
std::string format_scenario(const Scenario& scenario);

SimConfig parse_sim_config(const std::string& json_text);

/// Builds the initial state from the injection list and runs it.
ArrivalLog simulate(const Scenario& scenario);

}  // namespace mycosim
