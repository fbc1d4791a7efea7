#pragma once

#include "mycosim/common.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mycosim {

using NodeId = std::uint32_t;
using StrandId = std::uint32_t;

enum class NodeKind : std::uint8_t { tip, junction, fruit_body };
enum class StrandState : std::uint8_t { active, abandoned, enhanced };

std::string_view to_string(NodeKind kind);
std::string_view to_string(StrandState state);
std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<StrandState> parse_strand_state(std::string_view text);

/// Spikes travel on active and enhanced strands alike.
inline bool conductive(StrandState s) { return s != StrandState::abandoned; }

struct Node {
    NodeId id = 0;
    Vec3 pos{0.0, 0.0, 0.0};
    NodeKind kind = NodeKind::junction;

    friend bool operator==(const Node&, const Node&) = default;
};

struct Strand {
    StrandId id = 0;
    NodeId a = 0;
    NodeId b = 0;
    double length_mm = 0.0;
    StrandState state = StrandState::active;

    NodeId other(NodeId n) const noexcept { return n == a ? b : a; }

    friend bool operator==(const Strand&, const Strand&) = default;
};

/// Growth bookkeeping for a node that is still extending.
struct TipState {
    Vec3 heading{1.0, 0.0, 0.0};
    std::uint32_t rejections = 0;
    bool blocked = false;

    friend bool operator==(const TipState&, const TipState&) = default;
};

/**
 * Geometric graph of mycelium strands. Nodes and strands are kept sorted by
 * id; ids need not be contiguous. A strand's length is always the Euclidean
 * distance between its endpoints.
 */
class MyceliumNetwork {
public:
    explicit MyceliumNetwork(int dimensions = 2, std::uint64_t seed = 0);

    int dimensions() const noexcept { return dims_; }
    std::uint64_t seed() const noexcept { return seed_; }
    void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }
    std::uint64_t steps_taken() const noexcept { return steps_; }
    void set_steps_taken(std::uint64_t steps) noexcept { steps_ = steps; }

    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::span<const Strand> strands() const noexcept { return strands_; }
    const std::map<NodeId, TipState>& growth_tips() const noexcept { return tips_; }

    NodeId add_node(const Vec3& pos, NodeKind kind);
    /// Inserts a node with an explicit id; ids must be fresh.
    void insert_node(const Node& node);
    StrandId add_strand(NodeId a, NodeId b, StrandState state = StrandState::active);
    void insert_strand(const Strand& strand);

    const Node* find_node(NodeId id) const noexcept;
    const Strand* find_strand(StrandId id) const noexcept;
    const Node& node(NodeId id) const;
    const Strand& strand(StrandId id) const;

    void set_kind(NodeId id, NodeKind kind);
    void set_state(StrandId id, StrandState state);
    /// Moves a node and refreshes the length of every incident strand.
    void move_node(NodeId id, const Vec3& pos);

    void set_tip(NodeId id, const TipState& tip);
    void clear_tip(NodeId id);
    TipState* tip(NodeId id) noexcept;

    /// Strand ids incident to a node, in id order.
    std::vector<StrandId> incident(NodeId id) const;
    std::size_t degree(NodeId id) const { return incident(id).size(); }
    std::size_t conductive_degree(NodeId id) const;

    std::size_t count(NodeKind kind) const noexcept;
    NodeId next_node_id() const noexcept { return nodes_.empty() ? 0 : nodes_.back().id + 1; }
    StrandId next_strand_id() const noexcept { return strands_.empty() ? 0 : strands_.back().id + 1; }

    /// Throws DomainError on the first broken structural invariant.
    void validate() const;

    friend bool operator==(const MyceliumNetwork&, const MyceliumNetwork&) = default;

private:
    std::size_t node_index(NodeId id) const;

    int dims_;
    std::uint64_t seed_;
    std::uint64_t steps_ = 0;
    std::vector<Node> nodes_;
    std::vector<Strand> strands_;
    std::map<NodeId, TipState> tips_;
};

enum class PruneMode { abandon, enhance };

/**
 * Electrical shaping of the network.
 *
 * abandon: the listed strands stop conducting.
 * enhance: the listed strands are enhanced, and every unlisted strand sharing
 * a junction node with one of them is abandoned. Nodes are untouched.
 */
MyceliumNetwork electrical_prune(const MyceliumNetwork& network, std::span<const StrandId> strands, PruneMode mode);

/**
 * Text format `myceliumsim/network/v1`:
 *
 *     myceliumsim/network/v1
 *     dims 2
 *     seed <u64>
 *     steps <u64>
 *     nodes <count>
 *     node <id> <x> <y> [<z>] <tip|junction|fruit-body>
 *     strands <count>
 *     strand <id> <a> <b> <length_mm> <active|abandoned|enhanced>
 *     tips <count>
 *     tip <node id> <hx> <hy> [<hz>] <rejections> <blocked 0|1>
 *
 * z appears exactly when dims is 3. Numbers are written in shortest
 * round-trip form (17 significant digits at most).
 */
MyceliumNetwork parse_network(const std::string& text);
std::string format_network(const MyceliumNetwork& network);
MyceliumNetwork load_network(const std::filesystem::path& path);
void save_network(const MyceliumNetwork& network, const std::filesystem::path& path);

}  // namespace mycosim
