#pragma once

#include "mycosim/network.hpp"
#include "mycosim/spike_engine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mycosim {

inline constexpr std::size_t kMaxArity = 16;

struct PortAssignment {
    std::vector<NodeId> inputs;
    NodeId output = 0;
    double amplitude_mV = 1.0;
    double window_lo_s = 0.0;
    double window_hi_s = 600.0;

    /// Throws PortError/ArityError/ConfigError when the assignment does not fit the network.
    void validate(const MyceliumNetwork& network) const;
};

/**
 * Output bit per input vector. Vector index i fires input k exactly when bit
 * k of i is set, so input 0 is the least significant bit.
 */
struct TruthTable {
    std::size_t arity = 0;
    std::vector<std::uint8_t> bits;

    bool operator[](std::size_t vector) const { return bits.at(vector) != 0; }
    /// Bits from vector 0 upward, e.g. "0110" for XOR.
    std::string bit_string() const;
    /// Hex of the table read with vector 2^n-1 as the most significant bit.
    std::string hex() const;

    friend bool operator==(const TruthTable&, const TruthTable&) = default;
};

struct Realization {
    TruthTable table;
    std::vector<ArrivalLog> logs;
    bool unreachable = false;
};

/**
 * Runs one fresh simulation per input vector. All firing inputs inject at
 * t = 0; the output bit is 1 when at least one spike reaches the output node
 * inside [window_lo, window_hi]. The horizon is the window's upper end.
 * `threads` > 1 spreads the vectors over worker threads; results do not
 * depend on it.
 */
Realization realize_truth_table(const MyceliumNetwork& network, const PortAssignment& assignment,
                                const SimConfig& config, unsigned threads = 1);

struct FunctionClass {
    enum class Kind { constant_false, constant_true, and_gate, or_gate, xor_gate, nand_gate, nor_gate, xnor_gate, other };
    Kind kind = Kind::other;
    std::size_t arity = 0;
    std::string hex;

    std::string name() const;
    friend bool operator==(const FunctionClass&, const FunctionClass&) = default;
};

FunctionClass classify_function(const TruthTable& table);

/**
 * Independent evaluator used to cross-check realize_truth_table. Instead of an
 * event queue it iterates per-node arrival lists and per-strand entry lists
 * to a fixed point, each round recomputing collisions and refractory
 * filtering from scratch. Restricted to networks whose conductive part
 * reachable from the inputs is a forest with at most 50 strands.
 */
TruthTable brute_force_oracle(const MyceliumNetwork& network, const PortAssignment& assignment,
                              const SimConfig& config);

inline constexpr std::size_t kOracleMaxStrands = 50;

// ---------------------------------------------------------------------------
// geometry sweeps

struct LengthenStrand {
    StrandId strand = 0;
    double extra_mm = 0.0;
};
struct AbandonStrand {
    StrandId strand = 0;
};
struct AddStrand {
    NodeId a = 0;
    NodeId b = 0;
};
using EditOp = std::variant<LengthenStrand, AbandonStrand, AddStrand>;

/// A named bundle of primitive edits applied together to the base network.
struct GeometryEdit {
    std::string label;
    std::vector<EditOp> ops;
};

/**
 * Lengthening moves one endpoint outward along the strand: the endpoint of
 * degree one if there is exactly one, else `b`. Other strands touching the
 * moved node are re-measured.
 */
MyceliumNetwork apply_edit(const MyceliumNetwork& base, const GeometryEdit& edit);

struct SweepEntry {
    std::string label;
    std::optional<TruthTable> table;
    std::optional<FunctionClass> function;
    std::string error;
    bool changed = false;
};

/// First entry is the unedited base; then one entry per edit. A failing edit records its error and the sweep goes on.
std::vector<SweepEntry> geometry_sweep(const MyceliumNetwork& base, const std::vector<GeometryEdit>& edits,
                                       const PortAssignment& assignment, const SimConfig& config);

}  // namespace mycosim
