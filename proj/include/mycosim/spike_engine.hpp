#pragma once

#include "mycosim/network.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mycosim {

using SpikeId = std::uint64_t;

enum class CollisionRule { annihilate, priority_pass, fuse };

std::string_view to_string(CollisionRule rule);
std::optional<CollisionRule> parse_collision_rule(std::string_view text);

struct SimConfig {
    double speed_mm_s = 0.5;
    CollisionRule rule = CollisionRule::annihilate;
    /// Arrivals at a junction within this many seconds of the first one collide.
    double window_s = 1.0;
    double refractory_s = 120.0;
    double horizon_s = 3600.0;

    void validate() const;
};

/**
 * A travelling impulse. `position_mm` is the distance already covered from
 * the endpoint opposite `toward`, measured at time `time_s`. Injected spikes
 * sit at position 0 at their departure time.
 */
struct Spike {
    SpikeId id = 0;
    /// Id of the injected spike this one descends from.
    SpikeId origin = 0;
    StrandId strand = 0;
    NodeId toward = 0;
    double position_mm = 0.0;
    double amplitude_mV = 0.0;
    double birth_s = 0.0;
    double time_s = 0.0;

    friend bool operator==(const Spike&, const Spike&) = default;
};

struct Arrival {
    NodeId node = 0;
    double time_s = 0.0;
    double amplitude_mV = 0.0;
    SpikeId spike = 0;

    friend bool operator==(const Arrival&, const Arrival&) = default;
};

/// Arrivals at fruit-body and tip nodes in non-decreasing time order.
using ArrivalLog = std::vector<Arrival>;

/// Network plus the spikes waiting to be simulated.
class SimState {
public:
    explicit SimState(MyceliumNetwork network, double clock_s = 0.0);

    const MyceliumNetwork& network() const noexcept { return network_; }
    double clock() const noexcept { return clock_; }
    const std::vector<Spike>& spikes() const noexcept { return spikes_; }

    /// Places an already travelling spike; its id is assigned here.
    SpikeId add_spike(Spike spike);

    SpikeId next_spike_id() const noexcept { return next_id_; }

private:
    friend std::vector<SpikeId> inject_spike(SimState&, NodeId, double, double);

    MyceliumNetwork network_;
    double clock_;
    std::vector<Spike> spikes_;
    SpikeId next_id_ = 0;
};

/**
 * Schedules one spike per conductive strand incident to a fruit body, all
 * departing at `time_s`. Returns the new spike ids (empty for an isolated
 * port). Throws PortError for a non-fruit-body node and ChronologyError for a
 * time before the state clock.
 */
std::vector<SpikeId> inject_spike(SimState& state, NodeId node, double time_s, double amplitude_mV);

/**
 * Runs the discrete-event simulation until the horizon.
 *
 * Junction semantics: the first arrival at a junction opens a collision
 * group that collects every arrival up to `window_s` later. A lone spike
 * fans out onto every other conductive strand. With two or more members the
 * rule applies: annihilate kills all, priority-pass keeps the earliest-born
 * spike (ties by origin, then id), fuse keeps one spike carrying the summed
 * amplitude. Survivors leave at the group's opening time onto every
 * conductive strand none of the members arrived on.
 *
 * A strand refuses a spike entering before its previous occupant exits plus
 * the refractory period. Spikes reaching fruit bodies or tips are logged
 * and stop. Every conductive strand must take longer than `window_s` to
 * traverse, otherwise ConfigError.
 */
ArrivalLog run(const SimState& state, const SimConfig& config);

struct RunSummary {
    std::size_t arrivals = 0;
    std::optional<double> first_s;
    std::optional<double> last_s;
    std::map<NodeId, std::size_t> per_node;
};

RunSummary estimate_runtime_stats(const ArrivalLog& log);

std::string format_arrival_csv(const ArrivalLog& log);

}  // namespace mycosim
