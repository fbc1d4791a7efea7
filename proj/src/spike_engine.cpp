#include "mycosim/spike_engine.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace mycosim {

std::string_view to_string(CollisionRule rule) {
    switch (rule) {
        case CollisionRule::annihilate: return "annihilate";
        case CollisionRule::priority_pass: return "priority-pass";
        case CollisionRule::fuse: return "fuse";
    }
    return "?";
}

std::optional<CollisionRule> parse_collision_rule(std::string_view text) {
    if (text == "annihilate") return CollisionRule::annihilate;
    if (text == "priority-pass") return CollisionRule::priority_pass;
    if (text == "fuse") return CollisionRule::fuse;
    return std::nullopt;
}

void SimConfig::validate() const {
    if (!(speed_mm_s > 0.0) || !std::isfinite(speed_mm_s)) throw ConfigError("propagation speed must be positive");
    if (!(window_s >= 0.0) || !std::isfinite(window_s)) throw ConfigError("coincidence window must be >= 0");
    if (!(refractory_s >= 0.0) || !std::isfinite(refractory_s)) throw ConfigError("refractory period must be >= 0");
    if (!(horizon_s > 0.0) || !std::isfinite(horizon_s)) throw ConfigError("simulation horizon must be positive");
}

SimState::SimState(MyceliumNetwork network, double clock_s) : network_(std::move(network)), clock_(clock_s) {
    network_.validate();
}

SpikeId SimState::add_spike(Spike spike) {
    const auto& s = network_.strand(spike.strand);
    if (spike.toward != s.a && spike.toward != s.b) {
        throw DomainError("spike heads to node " + std::to_string(spike.toward) + " which is not on strand " +
                          std::to_string(s.id));
    }
    if (!(spike.position_mm >= 0.0 && spike.position_mm <= s.length_mm)) {
        throw DomainError("spike position outside strand " + std::to_string(s.id));
    }
    if (!(spike.amplitude_mV > 0.0)) throw DomainError("spike amplitude must be positive");
    if (spike.time_s < clock_) throw ChronologyError("spike placed before the state clock");
    spike.id = next_id_++;
    if (spike.origin > spike.id) spike.origin = spike.id;
    spikes_.push_back(spike);
    return spike.id;
}

std::vector<SpikeId> inject_spike(SimState& state, NodeId node, double time_s, double amplitude_mV) {
    const auto& n = state.network_.node(node);
    if (n.kind != NodeKind::fruit_body) {
        throw PortError("node " + std::to_string(node) + " is a " + std::string(to_string(n.kind)) +
                        ", spikes are injected at fruit bodies");
    }
    if (time_s < state.clock_) throw ChronologyError("injection time precedes the simulation clock");
    if (!(amplitude_mV > 0.0)) throw DomainError("spike amplitude must be positive");

    std::vector<SpikeId> ids;
    for (StrandId sid : state.network_.incident(node)) {
        const auto& s = state.network_.strand(sid);
        if (!conductive(s.state)) continue;
        Spike spike;
        spike.id = state.next_id_++;
        spike.origin = spike.id;
        spike.strand = sid;
        spike.toward = s.other(node);
        spike.position_mm = 0.0;
        spike.amplitude_mV = amplitude_mV;
        spike.birth_s = time_s;
        spike.time_s = time_s;
        state.spikes_.push_back(spike);
        ids.push_back(spike.id);
    }
    return ids;
}

namespace {

enum class EventKind : std::uint8_t { arrival = 0, decision = 1 };

struct Carried {
    SpikeId id;
    SpikeId origin;
    double amplitude;
    double birth;
};

struct Event {
    double time;
    EventKind kind;
    /// For decisions: the entry time the decision is about.
    double entry;
    NodeId node_id;
    SpikeId spike_id;
    std::uint32_t node;
    std::uint32_t strand;  // arrival: strand travelled; injection: strand to enter
    bool injection;
    Carried carried;
};

struct Later {
    bool operator()(const Event& x, const Event& y) const {
        if (x.time != y.time) return x.time > y.time;
        if (x.kind != y.kind) return x.kind > y.kind;
        if (x.entry != y.entry) return x.entry > y.entry;
        if (x.node_id != y.node_id) return x.node_id > y.node_id;
        return x.spike_id > y.spike_id;
    }
};

struct Member {
    Carried spike;
    std::uint32_t strand;
};

struct Group {
    bool open = false;
    double opened_at = 0.0;
    std::vector<Member> members;
};

/// Dense view of the network for the event loop.
struct Topology {
    std::vector<NodeId> node_ids;
    std::vector<NodeKind> kinds;
    std::vector<std::uint32_t> end_a, end_b;
    std::vector<double> transit;
    std::vector<StrandId> strand_ids;
    std::vector<std::uint32_t> adj_start;
    std::vector<std::uint32_t> adj;  // conductive strand indices per node, by strand id

    std::uint32_t index_of(NodeId id) const {
        auto it = std::lower_bound(node_ids.begin(), node_ids.end(), id);
        return static_cast<std::uint32_t>(it - node_ids.begin());
    }
    std::uint32_t strand_index(StrandId id) const {
        auto it = std::lower_bound(strand_ids.begin(), strand_ids.end(), id);
        return static_cast<std::uint32_t>(it - strand_ids.begin());
    }
    std::uint32_t far_end(std::uint32_t strand, std::uint32_t from) const {
        return end_a[strand] == from ? end_b[strand] : end_a[strand];
    }
};

Topology build_topology(const MyceliumNetwork& net, const SimConfig& config) {
    Topology t;
    for (const auto& n : net.nodes()) {
        t.node_ids.push_back(n.id);
        t.kinds.push_back(n.kind);
    }
    std::vector<std::vector<std::uint32_t>> adj(t.node_ids.size());
    for (const auto& s : net.strands()) {
        const auto idx = static_cast<std::uint32_t>(t.strand_ids.size());
        t.strand_ids.push_back(s.id);
        t.end_a.push_back(t.index_of(s.a));
        t.end_b.push_back(t.index_of(s.b));
        const double transit = s.length_mm / config.speed_mm_s;
        t.transit.push_back(transit);
        if (!conductive(s.state)) continue;
        if (!(transit - config.window_s > 1e-9)) {
            throw ConfigError("strand " + std::to_string(s.id) + " takes " + std::to_string(transit) +
                              " s to traverse, which does not exceed the coincidence window of " +
                              std::to_string(config.window_s) + " s");
        }
        adj[t.end_a.back()].push_back(idx);
        adj[t.end_b.back()].push_back(idx);
    }
    t.adj_start.push_back(0);
    for (const auto& list : adj) {
        t.adj.insert(t.adj.end(), list.begin(), list.end());
        t.adj_start.push_back(static_cast<std::uint32_t>(t.adj.size()));
    }
    return t;
}

}  // namespace

ArrivalLog run(const SimState& state, const SimConfig& config) {
    config.validate();
    const auto& net = state.network();
    const Topology topo = build_topology(net, config);
    const double horizon = config.horizon_s;
    const double window = config.window_s;

    std::priority_queue<Event, std::vector<Event>, Later> queue;
    std::vector<double> free_after(topo.strand_ids.size(), -std::numeric_limits<double>::infinity());
    std::vector<Group> groups(topo.node_ids.size());
    SpikeId next_id = state.next_spike_id();
    ArrivalLog log;

    auto push_arrival = [&](const Carried& c, std::uint32_t strand, std::uint32_t to, double at) {
        Event e{};
        e.time = at;
        e.kind = EventKind::arrival;
        e.entry = 0.0;
        e.node_id = topo.node_ids[to];
        e.spike_id = c.id;
        e.node = to;
        e.strand = strand;
        e.carried = c;
        queue.push(e);
    };

    // Tries to put a spike on a strand at `entry`; false if the strand is still refractory.
    auto enter = [&](const Carried& c, std::uint32_t strand, std::uint32_t from, double entry) {
        if (entry < free_after[strand]) return false;
        const double exit = entry + topo.transit[strand];
        free_after[strand] = exit + config.refractory_s;
        push_arrival(c, strand, topo.far_end(strand, from), exit);
        return true;
    };

    for (const auto& spike : state.spikes()) {
        const auto& s = net.strand(spike.strand);
        if (!(spike.position_mm >= 0.0 && spike.position_mm <= s.length_mm)) {
            throw DomainError("spike " + std::to_string(spike.id) + " lies outside its strand");
        }
        if (!conductive(s.state)) continue;
        const auto strand = topo.strand_index(spike.strand);
        const auto to = topo.index_of(spike.toward);
        const Carried c{spike.id, spike.origin, spike.amplitude_mV, spike.birth_s};
        if (spike.position_mm > 0.0) {
            const double exit = spike.time_s + (s.length_mm - spike.position_mm) / config.speed_mm_s;
            free_after[strand] = std::max(free_after[strand], exit + config.refractory_s);
            push_arrival(c, strand, to, exit);
            continue;
        }
        Event e{};
        e.time = spike.time_s + window;
        e.kind = EventKind::decision;
        e.entry = spike.time_s;
        const auto from = topo.far_end(strand, to);
        e.node_id = topo.node_ids[from];
        e.spike_id = spike.id;
        e.node = from;
        e.strand = strand;
        e.injection = true;
        e.carried = c;
        queue.push(e);
    }

    std::vector<std::uint32_t> excluded;
    while (!queue.empty()) {
        const Event e = queue.top();
        if (e.time > horizon) break;
        queue.pop();

        if (e.kind == EventKind::decision && e.injection) {
            enter(e.carried, e.strand, e.node, e.entry);
            continue;
        }

        if (e.kind == EventKind::arrival) {
            if (topo.kinds[e.node] != NodeKind::junction) {
                log.push_back({e.node_id, e.time, e.carried.amplitude, e.carried.id});
                continue;
            }
            Group& g = groups[e.node];
            if (!g.open) {
                g.open = true;
                g.opened_at = e.time;
                g.members.clear();
                Event r{};
                r.time = e.time + window;
                r.kind = EventKind::decision;
                r.entry = e.time;
                r.node_id = e.node_id;
                r.spike_id = e.spike_id;
                r.node = e.node;
                r.injection = false;
                queue.push(r);
            }
            g.members.push_back({e.carried, e.strand});
            continue;
        }

        // Collision group resolution.
        Group& g = groups[e.node];
        g.open = false;
        std::optional<Carried> survivor;
        if (g.members.size() == 1) {
            survivor = g.members.front().spike;
        } else if (config.rule == CollisionRule::priority_pass) {
            const auto best = std::min_element(g.members.begin(), g.members.end(), [](const Member& x, const Member& y) {
                if (x.spike.birth != y.spike.birth) return x.spike.birth < y.spike.birth;
                if (x.spike.origin != y.spike.origin) return x.spike.origin < y.spike.origin;
                return x.spike.id < y.spike.id;
            });
            survivor = best->spike;
        } else if (config.rule == CollisionRule::fuse) {
            Carried fused = g.members.front().spike;
            fused.amplitude = 0.0;
            for (const auto& m : g.members) {
                fused.amplitude += m.spike.amplitude;
                fused.birth = std::min(fused.birth, m.spike.birth);
                fused.origin = std::min(fused.origin, m.spike.origin);
            }
            survivor = fused;
        }
        if (!survivor) continue;

        excluded.clear();
        for (const auto& m : g.members) excluded.push_back(m.strand);
        for (auto k = topo.adj_start[e.node]; k < topo.adj_start[e.node + 1]; ++k) {
            const auto strand = topo.adj[k];
            if (std::find(excluded.begin(), excluded.end(), strand) != excluded.end()) continue;
            Carried child = *survivor;
            child.id = next_id;
            if (enter(child, strand, e.node, g.opened_at)) ++next_id;
        }
    }
    return log;
}

RunSummary estimate_runtime_stats(const ArrivalLog& log) {
    RunSummary out;
    out.arrivals = log.size();
    for (const auto& a : log) {
        if (!out.first_s || a.time_s < *out.first_s) out.first_s = a.time_s;
        if (!out.last_s || a.time_s > *out.last_s) out.last_s = a.time_s;
        ++out.per_node[a.node];
    }
    return out;
}

std::string format_arrival_csv(const ArrivalLog& log) {
    std::string out = "node_id,arrival_s,amplitude_mV,spike_id\n";
    for (const auto& a : log) {
        out += std::to_string(a.node) + ',' + detail::format_double(a.time_s) + ',' +
               detail::format_double(a.amplitude_mV) + ',' + std::to_string(a.spike) + '\n';
    }
    return out;
}

}  // namespace mycosim
