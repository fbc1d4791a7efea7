// Fixed-point evaluator for truth tables. Shares no code with the event loop
// in spike_engine.cpp: it repeatedly rebuilds every strand's accepted spikes
// and every junction's collision groups from the previous round's strand
// entries until nothing changes.

#include "mycosim/logic.hpp"

#include <algorithm>
#include <map>
#include <limits>
#include <numeric>

namespace mycosim {

namespace {

struct Entry {
    double time;
    NodeId from;
    std::uint64_t origin;
    double birth;
    double amplitude;

    bool operator==(const Entry&) const = default;
};

struct Reached {
    double time;
    std::size_t strand;  // index into the conductive strand list
    std::uint64_t origin;
    double birth;
    double amplitude;
};

struct Edge {
    NodeId a, b;
    double transit;
    StrandId id;
};

class Forest {
public:
    explicit Forest(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    bool unite(std::size_t x, std::size_t y) {
        x = find(x);
        y = find(y);
        if (x == y) return false;
        parent_[x] = y;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

void check_domain(const MyceliumNetwork& net, const PortAssignment& assignment) {
    if (net.strands().size() > kOracleMaxStrands) {
        throw UnsupportedInstance("oracle handles at most " + std::to_string(kOracleMaxStrands) + " strands, got " +
                                  std::to_string(net.strands().size()));
    }
    std::map<NodeId, std::size_t> index;
    for (const auto& n : net.nodes()) index.emplace(n.id, index.size());

    // Nodes connected to any input through conductive strands.
    std::vector<std::vector<std::pair<std::size_t, StrandId>>> adj(index.size());
    for (const auto& s : net.strands()) {
        if (!conductive(s.state)) continue;
        adj[index[s.a]].push_back({index[s.b], s.id});
        adj[index[s.b]].push_back({index[s.a], s.id});
    }
    std::vector<char> seen(index.size(), 0);
    std::vector<std::size_t> stack;
    for (NodeId in : assignment.inputs) {
        seen[index[in]] = 1;
        stack.push_back(index[in]);
    }
    while (!stack.empty()) {
        const auto at = stack.back();
        stack.pop_back();
        for (auto [next, sid] : adj[at]) {
            if (!seen[next]) {
                seen[next] = 1;
                stack.push_back(next);
            }
        }
    }
    Forest forest(index.size());
    for (const auto& s : net.strands()) {
        if (!conductive(s.state) || !seen[index[s.a]]) continue;
        if (!forest.unite(index[s.a], index[s.b])) {
            throw UnsupportedInstance("conductive network reachable from the inputs contains a cycle (strand " +
                                      std::to_string(s.id) + ")");
        }
    }
}

bool evaluate_vector(const MyceliumNetwork& net, const PortAssignment& assignment, const SimConfig& config,
                     std::size_t vector) {
    const double horizon = assignment.window_hi_s;
    const double window = config.window_s;

    std::vector<Edge> edges;
    std::map<NodeId, std::vector<std::size_t>> touching;
    for (const auto& s : net.strands()) {
        if (!conductive(s.state)) continue;
        const double transit = s.length_mm / config.speed_mm_s;
        if (!(transit - window > 1e-9)) throw ConfigError("strand transit does not exceed the coincidence window");
        touching[s.a].push_back(edges.size());
        touching[s.b].push_back(edges.size());
        edges.push_back({s.a, s.b, transit, s.id});
    }

    // Injected spikes, numbered exactly as inject_spike numbers them.
    std::vector<std::vector<Entry>> injected(edges.size());
    std::uint64_t next_origin = 0;
    for (std::size_t k = 0; k < assignment.inputs.size(); ++k) {
        if (!(vector >> k & 1u)) continue;
        const NodeId port = assignment.inputs[k];
        for (auto e : touching[port]) {
            injected[e].push_back({0.0, port, next_origin++, 0.0, assignment.amplitude_mV});
        }
    }

    std::vector<std::vector<Entry>> entries = injected;
    bool output_hit = false;
    const std::size_t max_rounds = 1'000'000;
    for (std::size_t round = 0; round < max_rounds; ++round) {
        // Strands: refractory filtering, producing arrivals at the far end.
        std::map<NodeId, std::vector<Reached>> arrivals;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            auto list = entries[e];
            std::sort(list.begin(), list.end(), [](const Entry& x, const Entry& y) {
                return x.time != y.time ? x.time < y.time : x.from < y.from;
            });
            double busy_until = -std::numeric_limits<double>::infinity();
            for (const auto& en : list) {
                if (en.time < busy_until) continue;
                const double exit = en.time + edges[e].transit;
                busy_until = exit + config.refractory_s;
                if (exit > horizon) continue;
                const NodeId to = en.from == edges[e].a ? edges[e].b : edges[e].a;
                arrivals[to].push_back({exit, e, en.origin, en.birth, en.amplitude});
            }
        }

        // Junctions: collision groups, producing the next round's strand entries.
        std::vector<std::vector<Entry>> next = injected;
        output_hit = false;
        for (auto& [node, list] : arrivals) {
            if (net.node(node).kind != NodeKind::junction) {
                if (node == assignment.output) {
                    for (const auto& r : list) {
                        if (r.time >= assignment.window_lo_s && r.time <= assignment.window_hi_s) output_hit = true;
                    }
                }
                continue;
            }
            std::sort(list.begin(), list.end(), [](const Reached& x, const Reached& y) { return x.time < y.time; });
            std::size_t i = 0;
            while (i < list.size()) {
                const double opened = list[i].time;
                std::size_t j = i;
                while (j < list.size() && list[j].time <= opened + window) ++j;
                // A group whose decision falls past the horizon never resolves.
                if (opened + window > horizon) break;

                std::vector<Reached> group(list.begin() + static_cast<std::ptrdiff_t>(i),
                                           list.begin() + static_cast<std::ptrdiff_t>(j));
                std::optional<Reached> keep;
                if (group.size() == 1) {
                    keep = group[0];
                } else if (config.rule == CollisionRule::priority_pass) {
                    keep = *std::min_element(group.begin(), group.end(), [](const Reached& x, const Reached& y) {
                        return x.birth != y.birth ? x.birth < y.birth : x.origin < y.origin;
                    });
                } else if (config.rule == CollisionRule::fuse) {
                    Reached f = group[0];
                    f.amplitude = 0.0;
                    for (const auto& g : group) {
                        f.amplitude += g.amplitude;
                        f.birth = std::min(f.birth, g.birth);
                        f.origin = std::min(f.origin, g.origin);
                    }
                    keep = f;
                }
                if (keep) {
                    for (auto e : touching[node]) {
                        const bool came_in = std::any_of(group.begin(), group.end(),
                                                         [e](const Reached& g) { return g.strand == e; });
                        if (!came_in) next[e].push_back({opened, node, keep->origin, keep->birth, keep->amplitude});
                    }
                }
                i = j;
            }
        }

        if (next == entries) return output_hit;
        entries = std::move(next);
    }
    throw UnsupportedInstance("oracle did not converge");
}

}  // namespace

TruthTable brute_force_oracle(const MyceliumNetwork& network, const PortAssignment& assignment,
                              const SimConfig& config) {
    assignment.validate(network);
    SimConfig cfg = config;
    cfg.horizon_s = assignment.window_hi_s;
    cfg.validate();
    check_domain(network, assignment);

    TruthTable table;
    table.arity = assignment.inputs.size();
    table.bits.resize(std::size_t{1} << table.arity);
    for (std::size_t v = 0; v < table.bits.size(); ++v) {
        table.bits[v] = evaluate_vector(network, assignment, cfg, v) ? 1 : 0;
    }
    return table;
}

}  // namespace mycosim
