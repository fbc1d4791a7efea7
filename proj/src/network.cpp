#include "mycosim/network.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace mycosim {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::tip: return "tip";
        case NodeKind::junction: return "junction";
        case NodeKind::fruit_body: return "fruit-body";
    }
    return "?";
}

std::string_view to_string(StrandState state) {
    switch (state) {
        case StrandState::active: return "active";
        case StrandState::abandoned: return "abandoned";
        case StrandState::enhanced: return "enhanced";
    }
    return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
    if (text == "tip") return NodeKind::tip;
    if (text == "junction") return NodeKind::junction;
    if (text == "fruit-body") return NodeKind::fruit_body;
    return std::nullopt;
}

std::optional<StrandState> parse_strand_state(std::string_view text) {
    if (text == "active") return StrandState::active;
    if (text == "abandoned") return StrandState::abandoned;
    if (text == "enhanced") return StrandState::enhanced;
    return std::nullopt;
}

MyceliumNetwork::MyceliumNetwork(int dimensions, std::uint64_t seed) : dims_(dimensions), seed_(seed) {
    if (dimensions != 2 && dimensions != 3) throw DimensionError("network dimensions must be 2 or 3");
}

std::size_t MyceliumNetwork::node_index(NodeId id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id, [](const Node& n, NodeId v) { return n.id < v; });
    if (it == nodes_.end() || it->id != id) throw NotFoundError("unknown node " + std::to_string(id));
    return static_cast<std::size_t>(it - nodes_.begin());
}

const Node* MyceliumNetwork::find_node(NodeId id) const noexcept {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id, [](const Node& n, NodeId v) { return n.id < v; });
    return (it != nodes_.end() && it->id == id) ? &*it : nullptr;
}

const Strand* MyceliumNetwork::find_strand(StrandId id) const noexcept {
    auto it =
        std::lower_bound(strands_.begin(), strands_.end(), id, [](const Strand& s, StrandId v) { return s.id < v; });
    return (it != strands_.end() && it->id == id) ? &*it : nullptr;
}

const Node& MyceliumNetwork::node(NodeId id) const {
    if (const auto* n = find_node(id)) return *n;
    throw NotFoundError("unknown node " + std::to_string(id));
}

const Strand& MyceliumNetwork::strand(StrandId id) const {
    if (const auto* s = find_strand(id)) return *s;
    throw NotFoundError("unknown strand " + std::to_string(id));
}

NodeId MyceliumNetwork::add_node(const Vec3& pos, NodeKind kind) {
    const NodeId id = next_node_id();
    insert_node({id, pos, kind});
    return id;
}

void MyceliumNetwork::insert_node(const Node& node) {
    if (dims_ == 2 && node.pos[2] != 0.0) throw DimensionError("2D network node with non-zero z");
    if (find_node(node.id)) throw DomainError("duplicate node id " + std::to_string(node.id));
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node.id,
                               [](const Node& n, NodeId v) { return n.id < v; });
    nodes_.insert(it, node);
}

StrandId MyceliumNetwork::add_strand(NodeId a, NodeId b, StrandState state) {
    const StrandId id = next_strand_id();
    insert_strand({id, a, b, 0.0, state});
    return id;
}

void MyceliumNetwork::insert_strand(const Strand& strand) {
    if (strand.a == strand.b) throw DomainError("self-loop strand " + std::to_string(strand.id));
    if (find_strand(strand.id)) throw DomainError("duplicate strand id " + std::to_string(strand.id));
    Strand s = strand;
    s.length_mm = distance(node(s.a).pos, node(s.b).pos);
    auto it = std::lower_bound(strands_.begin(), strands_.end(), s.id,
                               [](const Strand& x, StrandId v) { return x.id < v; });
    strands_.insert(it, s);
}

void MyceliumNetwork::set_kind(NodeId id, NodeKind kind) { nodes_[node_index(id)].kind = kind; }

void MyceliumNetwork::set_state(StrandId id, StrandState state) {
    auto it = std::lower_bound(strands_.begin(), strands_.end(), id,
                               [](const Strand& x, StrandId v) { return x.id < v; });
    if (it == strands_.end() || it->id != id) throw NotFoundError("unknown strand " + std::to_string(id));
    it->state = state;
}

void MyceliumNetwork::move_node(NodeId id, const Vec3& pos) {
    if (dims_ == 2 && pos[2] != 0.0) throw DimensionError("2D network node with non-zero z");
    nodes_[node_index(id)].pos = pos;
    for (auto& s : strands_) {
        if (s.a == id || s.b == id) s.length_mm = distance(node(s.a).pos, node(s.b).pos);
    }
}

void MyceliumNetwork::set_tip(NodeId id, const TipState& tip) {
    node_index(id);
    tips_[id] = tip;
}

void MyceliumNetwork::clear_tip(NodeId id) { tips_.erase(id); }

TipState* MyceliumNetwork::tip(NodeId id) noexcept {
    auto it = tips_.find(id);
    return it == tips_.end() ? nullptr : &it->second;
}

std::vector<StrandId> MyceliumNetwork::incident(NodeId id) const {
    std::vector<StrandId> out;
    for (const auto& s : strands_) {
        if (s.a == id || s.b == id) out.push_back(s.id);
    }
    return out;
}

std::size_t MyceliumNetwork::conductive_degree(NodeId id) const {
    std::size_t n = 0;
    for (const auto& s : strands_) {
        if ((s.a == id || s.b == id) && conductive(s.state)) ++n;
    }
    return n;
}

std::size_t MyceliumNetwork::count(NodeKind kind) const noexcept {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [kind](const Node& n) { return n.kind == kind; }));
}

void MyceliumNetwork::validate() const {
    for (const auto& n : nodes_) {
        if (dims_ == 2 && n.pos[2] != 0.0) throw DimensionError("node " + std::to_string(n.id) + " has z in a 2D network");
    }
    for (const auto& s : strands_) {
        if (s.a == s.b) throw DomainError("strand " + std::to_string(s.id) + " is a self-loop");
        const auto* a = find_node(s.a);
        const auto* b = find_node(s.b);
        if (!a || !b) throw DomainError("strand " + std::to_string(s.id) + " references a missing node");
        if (std::abs(s.length_mm - distance(a->pos, b->pos)) > 1e-9) {
            throw DomainError("strand " + std::to_string(s.id) + " length disagrees with endpoint distance");
        }
    }
    for (const auto& [id, tip] : tips_) {
        if (!find_node(id)) throw DomainError("tip state for missing node " + std::to_string(id));
    }
}

MyceliumNetwork electrical_prune(const MyceliumNetwork& network, std::span<const StrandId> strands, PruneMode mode) {
    for (auto id : strands) {
        if (!network.find_strand(id)) throw NotFoundError("unknown strand " + std::to_string(id));
    }
    MyceliumNetwork out = network;
    if (mode == PruneMode::abandon) {
        for (auto id : strands) out.set_state(id, StrandState::abandoned);
        return out;
    }

    const std::set<StrandId> listed(strands.begin(), strands.end());
    std::set<NodeId> junctions;
    for (auto id : listed) {
        const auto& s = network.strand(id);
        for (NodeId end : {s.a, s.b}) {
            if (network.node(end).kind == NodeKind::junction) junctions.insert(end);
        }
    }
    for (const auto& s : network.strands()) {
        if (listed.count(s.id)) continue;
        if (junctions.count(s.a) || junctions.count(s.b)) out.set_state(s.id, StrandState::abandoned);
    }
    for (auto id : listed) out.set_state(id, StrandState::enhanced);
    return out;
}

// ---------------------------------------------------------------------------
// text format

namespace {

constexpr std::string_view kNetworkHeader = "myceliumsim/network/v1";

}  // namespace

std::string format_network(const MyceliumNetwork& network) {
    using detail::format_double;
    const bool three_d = network.dimensions() == 3;
    std::string out;
    out += kNetworkHeader;
    out += "\ndims " + std::to_string(network.dimensions());
    out += "\nseed " + std::to_string(network.seed());
    out += "\nsteps " + std::to_string(network.steps_taken());
    out += "\nnodes " + std::to_string(network.nodes().size()) + "\n";
    for (const auto& n : network.nodes()) {
        out += "node " + std::to_string(n.id) + ' ' + format_double(n.pos[0]) + ' ' + format_double(n.pos[1]);
        if (three_d) out += ' ' + format_double(n.pos[2]);
        out += ' ';
        out += to_string(n.kind);
        out += '\n';
    }
    out += "strands " + std::to_string(network.strands().size()) + "\n";
    for (const auto& s : network.strands()) {
        out += "strand " + std::to_string(s.id) + ' ' + std::to_string(s.a) + ' ' + std::to_string(s.b) + ' ' +
               format_double(s.length_mm) + ' ';
        out += to_string(s.state);
        out += '\n';
    }
    out += "tips " + std::to_string(network.growth_tips().size()) + "\n";
    for (const auto& [id, tip] : network.growth_tips()) {
        out += "tip " + std::to_string(id) + ' ' + format_double(tip.heading[0]) + ' ' + format_double(tip.heading[1]);
        if (three_d) out += ' ' + format_double(tip.heading[2]);
        out += ' ' + std::to_string(tip.rejections) + ' ' + (tip.blocked ? "1" : "0") + '\n';
    }
    return out;
}

MyceliumNetwork parse_network(const std::string& text) {
    using detail::parse_double;
    using detail::parse_u64;

    const auto lines = detail::content_lines(text);
    if (lines.empty() || lines[0].text != kNetworkHeader) {
        throw ParseError(lines.empty() ? 1 : lines[0].number, "header",
                         "expected '" + std::string(kNetworkHeader) + "'");
    }
    std::size_t pos = 1;

    auto keyed = [&](std::string_view key) -> std::pair<std::uint64_t, std::size_t> {
        if (pos >= lines.size()) throw ParseError(lines.back().number, std::string(key), "missing '" + std::string(key) + "' line");
        const auto toks = detail::split_ws(lines[pos].text);
        if (toks.size() != 2 || toks[0] != key) {
            throw ParseError(lines[pos].number, std::string(key), "expected '" + std::string(key) + " <value>'");
        }
        const auto value = parse_u64(toks[1], lines[pos].number, std::string(key));
        return {value, lines[pos++].number};
    };

    const auto [dims, dims_line] = keyed("dims");
    if (dims != 2 && dims != 3) throw ParseError(dims_line, "dims", "must be 2 or 3");
    const bool three_d = dims == 3;
    const auto [seed, seed_line] = keyed("seed");
    const auto [steps, steps_line] = keyed("steps");
    (void)seed_line;
    (void)steps_line;

    MyceliumNetwork net(static_cast<int>(dims), seed);
    net.set_steps_taken(steps);

    const auto id_of = [](std::string_view tok, std::size_t line, const char* field) {
        const auto v = parse_u64(tok, line, field);
        if (v > 0xFFFFFFFFull) throw ParseError(line, field, "id out of range");
        return static_cast<std::uint32_t>(v);
    };

    const auto [node_count, nodes_line] = keyed("nodes");
    for (std::uint64_t i = 0; i < node_count; ++i, ++pos) {
        if (pos >= lines.size()) throw ParseError(nodes_line, "nodes", "fewer node lines than declared");
        const auto ln = lines[pos].number;
        const auto t = detail::split_ws(lines[pos].text);
        const std::size_t expect = three_d ? 6 : 5;
        if (t.empty() || t[0] != "node" || t.size() != expect) {
            throw ParseError(ln, "node", "expected 'node <id> <x> <y>" + std::string(three_d ? " <z>" : "") + " <kind>'");
        }
        Node n;
        n.id = id_of(t[1], ln, "node.id");
        n.pos[0] = parse_double(t[2], ln, "node.x");
        n.pos[1] = parse_double(t[3], ln, "node.y");
        if (three_d) n.pos[2] = parse_double(t[4], ln, "node.z");
        const auto kind = parse_node_kind(t[expect - 1]);
        if (!kind) throw ParseError(ln, "node.kind", "unknown node kind '" + std::string(t[expect - 1]) + "'");
        n.kind = *kind;
        if (net.find_node(n.id)) throw ParseError(ln, "node.id", "duplicate node id " + std::to_string(n.id));
        net.insert_node(n);
    }

    const auto [strand_count, strands_line] = keyed("strands");
    if (node_count == 0 && strand_count > 0) {
        throw ParseError(strands_line, "strands", "strands listed but the node list is empty");
    }
    for (std::uint64_t i = 0; i < strand_count; ++i, ++pos) {
        if (pos >= lines.size()) throw ParseError(strands_line, "strands", "fewer strand lines than declared");
        const auto ln = lines[pos].number;
        const auto t = detail::split_ws(lines[pos].text);
        if (t.size() != 6 || t[0] != "strand") {
            throw ParseError(ln, "strand", "expected 'strand <id> <a> <b> <length_mm> <state>'");
        }
        Strand s;
        s.id = id_of(t[1], ln, "strand.id");
        s.a = id_of(t[2], ln, "strand.a");
        s.b = id_of(t[3], ln, "strand.b");
        const double length = parse_double(t[4], ln, "strand.length_mm");
        const auto state = parse_strand_state(t[5]);
        if (!state) throw ParseError(ln, "strand.state", "unknown strand state '" + std::string(t[5]) + "'");
        s.state = *state;
        if (!net.find_node(s.a)) throw ParseError(ln, "strand.a", "references missing node " + std::to_string(s.a));
        if (!net.find_node(s.b)) throw ParseError(ln, "strand.b", "references missing node " + std::to_string(s.b));
        if (s.a == s.b) throw ParseError(ln, "strand", "self-loop on node " + std::to_string(s.a));
        if (net.find_strand(s.id)) throw ParseError(ln, "strand.id", "duplicate strand id " + std::to_string(s.id));
        net.insert_strand(s);
        if (std::abs(net.strand(s.id).length_mm - length) > 1e-9) {
            throw ParseError(ln, "strand.length_mm", "length disagrees with endpoint distance");
        }
    }

    const auto [tip_count, tips_line] = keyed("tips");
    for (std::uint64_t i = 0; i < tip_count; ++i, ++pos) {
        if (pos >= lines.size()) throw ParseError(tips_line, "tips", "fewer tip lines than declared");
        const auto ln = lines[pos].number;
        const auto t = detail::split_ws(lines[pos].text);
        const std::size_t expect = three_d ? 7 : 6;
        if (t.size() != expect || t[0] != "tip") throw ParseError(ln, "tip", "malformed tip line");
        const NodeId id = id_of(t[1], ln, "tip.node");
        if (!net.find_node(id)) throw ParseError(ln, "tip.node", "references missing node " + std::to_string(id));
        TipState tip;
        tip.heading[0] = parse_double(t[2], ln, "tip.hx");
        tip.heading[1] = parse_double(t[3], ln, "tip.hy");
        tip.heading[2] = three_d ? parse_double(t[4], ln, "tip.hz") : 0.0;
        const auto rej = parse_u64(t[expect - 2], ln, "tip.rejections");
        const auto blocked = parse_u64(t[expect - 1], ln, "tip.blocked");
        if (blocked > 1) throw ParseError(ln, "tip.blocked", "expected 0 or 1");
        tip.rejections = static_cast<std::uint32_t>(rej);
        tip.blocked = blocked == 1;
        net.set_tip(id, tip);
    }
    if (pos != lines.size()) throw ParseError(lines[pos].number, "trailer", "unexpected content after tip list");
    return net;
}

MyceliumNetwork load_network(const std::filesystem::path& path) { return parse_network(detail::read_file(path)); }

void save_network(const MyceliumNetwork& network, const std::filesystem::path& path) {
    detail::write_file(path, format_network(network));
}

}  // namespace mycosim
