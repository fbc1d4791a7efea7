#pragma once

// Network and field builders shared by the unit tests and the acceptance run.

#include "mycosim/logic.hpp"
#include "mycosim/network.hpp"
#include "mycosim/substrate.hpp"

#include <filesystem>
#include <string>

namespace fixtures {

using namespace mycosim;

/// A(0) -- la -- J(1) -- lb -- B(2), both ends fruit bodies.
inline MyceliumNetwork path(double la = 10.0, double lb = 10.0) {
    MyceliumNetwork net;
    net.add_node({0.0, 0.0, 0.0}, NodeKind::fruit_body);
    net.add_node({la, 0.0, 0.0}, NodeKind::junction);
    net.add_node({la + lb, 0.0, 0.0}, NodeKind::fruit_body);
    net.add_strand(0, 1);
    net.add_strand(1, 2);
    return net;
}

/// A single strand between two fruit bodies.
inline MyceliumNetwork single(double length) {
    MyceliumNetwork net;
    net.add_node({0.0, 0.0, 0.0}, NodeKind::fruit_body);
    net.add_node({length, 0.0, 0.0}, NodeKind::fruit_body);
    net.add_strand(0, 1);
    return net;
}

/**
 * Y junction: inputs A(0), B(1) and output C(2) around junction J(3).
 * Strands 0: A-J, 1: B-J, 2: J-C.
 */
inline MyceliumNetwork y_junction(double arm_a = 10.0, double arm_b = 10.0, double arm_c = 10.0) {
    MyceliumNetwork net;
    net.add_node({-arm_a, 0.0, 0.0}, NodeKind::fruit_body);
    net.add_node({arm_b, 0.0, 0.0}, NodeKind::fruit_body);
    net.add_node({0.0, arm_c, 0.0}, NodeKind::fruit_body);
    net.add_node({0.0, 0.0, 0.0}, NodeKind::junction);
    net.add_strand(0, 3);
    net.add_strand(1, 3);
    net.add_strand(3, 2);
    return net;
}

inline PortAssignment y_ports(double hi = 100.0) {
    PortAssignment pa;
    pa.inputs = {0, 1};
    pa.output = 2;
    pa.window_lo_s = 0.0;
    pa.window_hi_s = hi;
    return pa;
}

inline SimConfig config(CollisionRule rule, double window = 1.0) {
    SimConfig c;
    c.rule = rule;
    c.window_s = window;
    return c;
}

inline SubstrateField uniform_field(std::size_t n, double nutrient, double cell_mm = 1.0) {
    SubstrateField f(n, n, 1, cell_mm);
    f.fill_nutrient(nutrient);
    return f;
}

/// One randomly drawn logic instance for oracle comparisons.
struct Instance {
    MyceliumNetwork network;
    PortAssignment ports;
    SimConfig config;
};

/**
 * Random tree (occasionally a forest) of up to `max_strands` strands on a
 * 5 mm lattice, so equal path lengths, and therefore exact coincidences,
 * are common. Leaves are fruit bodies, the rest junctions; some strands are
 * abandoned.
 */
inline Instance random_instance(Rng& rng, std::size_t max_strands = 20, std::size_t max_inputs = 3) {
    for (;;) {
        MyceliumNetwork net;
        const std::size_t strands = 2 + rng.below(max_strands - 1);
        net.add_node({0.0, 0.0, 0.0}, NodeKind::junction);
        std::size_t roots = 1;
        for (std::size_t s = 0; s < strands; ++s) {
            const NodeId parent = static_cast<NodeId>(rng.below(net.nodes().size()));
            const double len = 5.0 * static_cast<double>(1 + rng.below(6));
            const auto& p = net.node(parent).pos;
            Vec3 dir{0.0, 0.0, 0.0};
            dir[rng.below(2)] = rng.bernoulli(0.5) ? 1.0 : -1.0;
            const NodeId child = net.add_node(p + len * dir, NodeKind::junction);
            net.add_strand(parent, child);
            if (rng.bernoulli(0.05) && roots < 2) {
                net.add_node({1000.0, 1000.0, 0.0}, NodeKind::junction);
                ++roots;
            }
        }
        for (const auto& n : net.nodes()) {
            if (net.degree(n.id) <= 1) net.set_kind(n.id, NodeKind::fruit_body);
        }
        for (const auto& s : net.strands()) {
            if (rng.bernoulli(0.1)) net.set_state(s.id, StrandState::abandoned);
        }
        std::vector<NodeId> ports;
        for (const auto& n : net.nodes()) {
            if (n.kind == NodeKind::fruit_body) ports.push_back(n.id);
        }
        if (ports.size() < 2) continue;
        for (std::size_t i = ports.size(); i > 1; --i) std::swap(ports[i - 1], ports[rng.below(i)]);

        Instance inst{net, {}, {}};
        const std::size_t n_inputs = 1 + rng.below(std::min(max_inputs, ports.size() - 1));
        inst.ports.inputs.assign(ports.begin(), ports.begin() + static_cast<std::ptrdiff_t>(n_inputs));
        inst.ports.output = ports[n_inputs];
        inst.ports.window_lo_s = rng.bernoulli(0.2) ? 30.0 : 0.0;
        inst.ports.window_hi_s = 100.0 + 50.0 * static_cast<double>(rng.below(8));
        const CollisionRule rules[] = {CollisionRule::annihilate, CollisionRule::priority_pass, CollisionRule::fuse};
        inst.config.rule = rules[rng.below(3)];
        const double windows[] = {0.0, 1.0, 5.0};
        inst.config.window_s = windows[rng.below(3)];
        const double refractory[] = {0.0, 15.0, 120.0};
        inst.config.refractory_s = refractory[rng.below(3)];
        return inst;
    }
}

/// Scratch directory under the working directory, emptied on creation.
inline std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::current_path() / "scratch" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
