#include "mycosim/logic.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <thread>

namespace mycosim {

void PortAssignment::validate(const MyceliumNetwork& network) const {
    if (inputs.size() > kMaxArity) {
        throw ArityError(std::to_string(inputs.size()) + " inputs exceed the limit of " + std::to_string(kMaxArity));
    }
    if (inputs.empty()) throw PortError("at least one input port is required");
    std::set<NodeId> seen;
    for (NodeId id : inputs) {
        const auto* n = network.find_node(id);
        if (!n) throw PortError("input node " + std::to_string(id) + " does not exist");
        if (n->kind != NodeKind::fruit_body) throw PortError("input node " + std::to_string(id) + " is not a fruit body");
        if (!seen.insert(id).second) throw PortError("input node " + std::to_string(id) + " listed twice");
    }
    const auto* out = network.find_node(output);
    if (!out) throw PortError("output node " + std::to_string(output) + " does not exist");
    if (out->kind == NodeKind::junction) throw PortError("output node must be a fruit body or tip, not a junction");
    if (seen.count(output)) throw PortError("output node is also an input");
    if (!(window_lo_s <= window_hi_s)) throw ConfigError("readout window is empty");
    if (!(window_hi_s > 0.0)) throw ConfigError("readout window must end after t = 0");
    if (!(amplitude_mV > 0.0)) throw ConfigError("injection amplitude must be positive");
}

std::string TruthTable::bit_string() const {
    std::string s;
    for (auto b : bits) s += b ? '1' : '0';
    return s;
}

std::string TruthTable::hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t n_digits = std::max<std::size_t>(1, (bits.size() + 3) / 4);
    std::string out(n_digits, '0');
    for (std::size_t d = 0; d < n_digits; ++d) {
        unsigned v = 0;
        for (unsigned k = 0; k < 4; ++k) {
            const auto idx = d * 4 + k;
            if (idx < bits.size() && bits[idx]) v |= 1u << k;
        }
        out[n_digits - 1 - d] = digits[v];
    }
    return out;
}

namespace {

bool output_reachable(const MyceliumNetwork& net, const PortAssignment& a) {
    std::set<NodeId> visited(a.inputs.begin(), a.inputs.end());
    std::deque<NodeId> frontier(a.inputs.begin(), a.inputs.end());
    while (!frontier.empty()) {
        const NodeId at = frontier.front();
        frontier.pop_front();
        const bool is_input = std::find(a.inputs.begin(), a.inputs.end(), at) != a.inputs.end();
        if (!is_input && net.node(at).kind != NodeKind::junction) continue;
        for (StrandId sid : net.incident(at)) {
            const auto& s = net.strand(sid);
            if (!conductive(s.state)) continue;
            const NodeId next = s.other(at);
            if (next == a.output) return true;
            if (visited.insert(next).second) frontier.push_back(next);
        }
    }
    return false;
}

ArrivalLog run_vector(const MyceliumNetwork& net, const PortAssignment& a, const SimConfig& config,
                      std::size_t vector) {
    SimState state(net);
    for (std::size_t k = 0; k < a.inputs.size(); ++k) {
        if (vector >> k & 1u) inject_spike(state, a.inputs[k], 0.0, a.amplitude_mV);
    }
    return run(state, config);
}

}  // namespace

Realization realize_truth_table(const MyceliumNetwork& network, const PortAssignment& assignment,
                                const SimConfig& config, unsigned threads) {
    assignment.validate(network);
    SimConfig cfg = config;
    cfg.horizon_s = assignment.window_hi_s;
    cfg.validate();

    const std::size_t n = assignment.inputs.size();
    const std::size_t vectors = std::size_t{1} << n;
    Realization out;
    out.table.arity = n;
    out.table.bits.assign(vectors, 0);
    out.logs.resize(vectors);
    out.unreachable = !output_reachable(network, assignment);

    auto evaluate = [&](std::size_t v) {
        out.logs[v] = run_vector(network, assignment, cfg, v);
        const bool hit = std::any_of(out.logs[v].begin(), out.logs[v].end(), [&](const Arrival& arr) {
            return arr.node == assignment.output && arr.time_s >= assignment.window_lo_s &&
                   arr.time_s <= assignment.window_hi_s;
        });
        out.table.bits[v] = hit ? 1 : 0;
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(vectors)));
    if (workers == 1) {
        for (std::size_t v = 0; v < vectors; ++v) evaluate(v);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t v = w; v < vectors; v += workers) evaluate(v);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::string FunctionClass::name() const {
    switch (kind) {
        case Kind::constant_false: return "FALSE";
        case Kind::constant_true: return "TRUE";
        case Kind::and_gate: return "AND";
        case Kind::or_gate: return "OR";
        case Kind::xor_gate: return "XOR";
        case Kind::nand_gate: return "NAND";
        case Kind::nor_gate: return "NOR";
        case Kind::xnor_gate: return "XNOR";
        case Kind::other: break;
    }
    return "other(n=" + std::to_string(arity) + ",0x" + hex + ")";
}

FunctionClass classify_function(const TruthTable& table) {
    if (table.bits.size() != (std::size_t{1} << table.arity)) {
        throw DomainError("truth table length does not match its arity");
    }
    using Kind = FunctionClass::Kind;
    FunctionClass fc{Kind::other, table.arity, table.hex()};
    const auto ones = std::count(table.bits.begin(), table.bits.end(), 1);
    if (ones == 0) {
        fc.kind = Kind::constant_false;
    } else if (static_cast<std::size_t>(ones) == table.bits.size()) {
        fc.kind = Kind::constant_true;
    } else if (table.arity == 2) {
        const auto s = table.bit_string();
        if (s == "0001") fc.kind = Kind::and_gate;
        else if (s == "0111") fc.kind = Kind::or_gate;
        else if (s == "0110") fc.kind = Kind::xor_gate;
        else if (s == "1110") fc.kind = Kind::nand_gate;
        else if (s == "1000") fc.kind = Kind::nor_gate;
        else if (s == "1001") fc.kind = Kind::xnor_gate;
    }
    return fc;
}

MyceliumNetwork apply_edit(const MyceliumNetwork& base, const GeometryEdit& edit) {
    MyceliumNetwork net = base;
    for (const auto& op : edit.ops) {
        if (const auto* lengthen = std::get_if<LengthenStrand>(&op)) {
            const Strand s = net.strand(lengthen->strand);
            const double target = s.length_mm + lengthen->extra_mm;
            if (!(target > 0.0)) throw DomainError("lengthening strand " + std::to_string(s.id) + " leaves no length");
            const bool a_leaf = net.degree(s.a) == 1;
            const bool b_leaf = net.degree(s.b) == 1;
            const NodeId moved = (a_leaf && !b_leaf) ? s.a : s.b;
            const NodeId fixed = s.other(moved);
            const Vec3 from = net.node(fixed).pos;
            const Vec3 dir = (1.0 / s.length_mm) * (net.node(moved).pos - from);
            net.move_node(moved, from + target * dir);
        } else if (const auto* abandon = std::get_if<AbandonStrand>(&op)) {
            net.set_state(abandon->strand, StrandState::abandoned);
        } else if (const auto* add = std::get_if<AddStrand>(&op)) {
            net.node(add->a);
            net.node(add->b);
            if (add->a == add->b) throw DomainError("cannot add a self-loop strand");
            net.add_strand(add->a, add->b);
        }
    }
    net.validate();
    return net;
}

std::vector<SweepEntry> geometry_sweep(const MyceliumNetwork& base, const std::vector<GeometryEdit>& edits,
                                       const PortAssignment& assignment, const SimConfig& config) {
    std::vector<SweepEntry> out;
    const auto base_table = realize_truth_table(base, assignment, config).table;
    out.push_back({"base", base_table, classify_function(base_table), {}, false});
    for (const auto& edit : edits) {
        SweepEntry entry;
        entry.label = edit.label;
        try {
            const auto variant = apply_edit(base, edit);
            auto table = realize_truth_table(variant, assignment, config).table;
            entry.function = classify_function(table);
            entry.changed = table != base_table;
            entry.table = std::move(table);
        } catch (const Error& e) {
            entry.error = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace mycosim
