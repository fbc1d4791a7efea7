#pragma once

#include "mycosim/network.hpp"
#include "mycosim/substrate.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mycosim {

/// Steps [first, last) during which a high-voltage pulse boosts branching.
struct StimulusWindow {
    std::uint64_t first_step = 0;
    std::uint64_t last_step = 0;
};

struct GrowthParams {
    double step_mm = 1.0;
    double branching_coefficient = 0.2;
    double tropism_weight = 1.0;
    double repellent_weight = 1.0;
    double noise_rad = 0.2;
    double branch_angle_rad = 0.7853981633974483;  // 45 degrees
    std::uint64_t max_steps = 50;
    std::uint64_t max_nodes = 10000;
    double branching_boost = 1.0;
    std::vector<StimulusWindow> stimulus;
    /// After growth stops, this many surviving tips (lowest ids first) become fruit bodies.
    std::uint64_t fruiting_tips = 0;

    void validate() const;
};

GrowthParams load_growth_params(const std::filesystem::path& path);
GrowthParams parse_growth_params(const std::string& json_text);
std::string format_growth_params(const GrowthParams& params);

/// Consecutive rejected moves after which a tip is retired.
inline constexpr std::uint32_t kBlockAfterRejections = 3;

struct StepOutcome {
    MyceliumNetwork network;
    std::size_t branches = 0;
    /// Set when the network had no live tip to advance.
    bool no_tips = false;
    /// Set when the node budget cut the step short.
    bool budget_hit = false;
};

/**
 * Advances every live tip once.
 *
 * Heading: normalize(previous + w * grad(attractant) - r * grad(repellent)),
 * then rotated by a N(0, noise) angle. Moves landing in forbidden or
 * off-grid cells are rejected; the tip stays put and retires after
 * kBlockAfterRejections consecutive rejections. An advancing tip branches
 * with probability min(1, k_b * nutrient * boost) where the boost applies only
 * inside a stimulus window. The branch leaves from the old tip position at
 * +/- branch angle. Tips are processed in node id order.
 */
StepOutcome grow_step(const MyceliumNetwork& network, const SubstrateField& field, const GrowthParams& params,
                      Rng& rng);

enum class GrowthStop { zero_budget, max_steps, max_nodes, all_tips_blocked };
std::string_view to_string(GrowthStop reason);

struct GrowthResult {
    MyceliumNetwork network;
    GrowthStop reason = GrowthStop::max_steps;
    std::uint64_t steps = 0;
    std::size_t branches = 0;
    /// Fruit bodies left with no strand (only when nothing else exists to attach to).
    std::vector<NodeId> isolated_ports;
};

/**
 * Repeats grow_step until the step budget, node budget or tip supply runs
 * out, then converts `fruiting_tips` tips to fruit bodies and attaches any
 * isolated fruit body to its nearest node with a straight strand.
 * The network's seed field records `seed`.
 */
GrowthResult grow(const MyceliumNetwork& network, const SubstrateField& field, const GrowthParams& params,
                  std::uint64_t seed);

/// Checks that the network lives in the field's frame and on growable cells.
void check_frame(const MyceliumNetwork& network, const SubstrateField& field);

/// A single fruit body at the field centre that grows along +x.
MyceliumNetwork default_seed_network(const SubstrateField& field);

}  // namespace mycosim
