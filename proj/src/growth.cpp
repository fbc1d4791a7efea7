#include "mycosim/growth.hpp"

#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>

namespace mycosim {

void GrowthParams::validate() const {
    if (!(step_mm > 0.0)) throw ConfigError("growth step must be positive");
    if (!(branching_coefficient >= 0.0)) throw ConfigError("branching coefficient must be >= 0");
    if (!(tropism_weight >= 0.0)) throw ConfigError("tropism weight must be >= 0");
    if (!(repellent_weight >= 0.0)) throw ConfigError("repellent weight must be >= 0");
    if (!(noise_rad >= 0.0)) throw ConfigError("direction noise must be >= 0");
    if (!std::isfinite(branch_angle_rad)) throw ConfigError("branch angle must be finite");
    if (max_steps < 1) throw ConfigError("max steps must be >= 1");
    if (max_nodes < 1) throw ConfigError("max nodes must be >= 1");
    if (!(branching_boost >= 1.0)) throw ConfigError("branching boost must be >= 1");
    for (const auto& w : stimulus) {
        if (w.last_step < w.first_step) throw ConfigError("stimulus window ends before it starts");
    }
}

GrowthParams parse_growth_params(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, "json", e.what());
    }
    if (!j.is_object()) throw ParseError(0, "json", "growth parameters must be a JSON object");
    if (j.contains("format") && j["format"] != "myceliumsim/growth/v1") {
        throw ParseError(0, "format", "expected myceliumsim/growth/v1");
    }
    GrowthParams p;
    try {
        p.step_mm = j.value("step_mm", p.step_mm);
        p.branching_coefficient = j.value("branching_coefficient", p.branching_coefficient);
        p.tropism_weight = j.value("tropism_weight", p.tropism_weight);
        p.repellent_weight = j.value("repellent_weight", p.repellent_weight);
        p.noise_rad = j.value("noise_rad", p.noise_rad);
        p.branch_angle_rad = j.value("branch_angle_rad", p.branch_angle_rad);
        p.max_steps = j.value("max_steps", p.max_steps);
        p.max_nodes = j.value("max_nodes", p.max_nodes);
        p.branching_boost = j.value("branching_boost", p.branching_boost);
        p.fruiting_tips = j.value("fruiting_tips", p.fruiting_tips);
        if (j.contains("stimulus")) {
            for (const auto& w : j.at("stimulus")) {
                p.stimulus.push_back({w.at(0).get<std::uint64_t>(), w.at(1).get<std::uint64_t>()});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, "growth", e.what());
    }
    return p;
}

GrowthParams load_growth_params(const std::filesystem::path& path) {
    return parse_growth_params(detail::read_file(path));
}

std::string format_growth_params(const GrowthParams& p) {
    nlohmann::ordered_json j;
    j["format"] = "myceliumsim/growth/v1";
    j["step_mm"] = p.step_mm;
    j["branching_coefficient"] = p.branching_coefficient;
    j["tropism_weight"] = p.tropism_weight;
    j["repellent_weight"] = p.repellent_weight;
    j["noise_rad"] = p.noise_rad;
    j["branch_angle_rad"] = p.branch_angle_rad;
    j["max_steps"] = p.max_steps;
    j["max_nodes"] = p.max_nodes;
    j["branching_boost"] = p.branching_boost;
    j["fruiting_tips"] = p.fruiting_tips;
    auto windows = nlohmann::ordered_json::array();
    for (const auto& w : p.stimulus) windows.push_back({w.first_step, w.last_step});
    j["stimulus"] = windows;
    return j.dump(2) + "\n";
}

std::string_view to_string(GrowthStop reason) {
    switch (reason) {
        case GrowthStop::zero_budget: return "zero-budget";
        case GrowthStop::max_steps: return "max-steps";
        case GrowthStop::max_nodes: return "max-nodes";
        case GrowthStop::all_tips_blocked: return "all-tips-blocked";
    }
    return "?";
}

void check_frame(const MyceliumNetwork& network, const SubstrateField& field) {
    if (network.dimensions() != field.dimensions()) {
        throw DimensionError("network is " + std::to_string(network.dimensions()) + "D but the substrate is " +
                             std::to_string(field.dimensions()) + "D");
    }
    for (const auto& n : network.nodes()) {
        const auto cell = field.cell_at(n.pos);
        if (!cell) throw DimensionError("node " + std::to_string(n.id) + " lies outside the substrate grid");
        if (field.mask(*cell) != CellState::growable) {
            throw DomainError("node " + std::to_string(n.id) + " lies in a forbidden cell");
        }
    }
}

namespace {

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return n > 0.0 ? (1.0 / n) * v : v;
}

/// Rodrigues rotation of v about a unit axis.
Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return (c * v) + (s * cross(axis, v)) + ((1.0 - c) * dot(axis, v)) * axis;
}

/// A unit axis perpendicular to d. In 2D this is always +z; in 3D it is drawn from rng.
Vec3 turn_axis(const Vec3& d, int dims, Rng& rng) {
    if (dims == 2) return {0.0, 0.0, 1.0};
    for (;;) {
        const Vec3 r{rng.normal(), rng.normal(), rng.normal()};
        const Vec3 axis = cross(d, r);
        if (norm(axis) > 1e-9) return normalized(axis);
    }
}

bool stimulated(const GrowthParams& params, std::uint64_t step) {
    return std::any_of(params.stimulus.begin(), params.stimulus.end(),
                       [step](const StimulusWindow& w) { return step >= w.first_step && step < w.last_step; });
}

}  // namespace

StepOutcome grow_step(const MyceliumNetwork& network, const SubstrateField& field, const GrowthParams& params,
                      Rng& rng) {
    params.validate();
    check_frame(network, field);

    StepOutcome out{network};
    MyceliumNetwork& net = out.network;

    std::vector<NodeId> live;
    for (const auto& [id, tip] : network.growth_tips()) {
        if (!tip.blocked) live.push_back(id);
    }
    if (live.empty()) {
        out.no_tips = true;
        return out;
    }

    const double boost = stimulated(params, network.steps_taken()) ? params.branching_boost : 1.0;
    const int dims = net.dimensions();

    for (NodeId id : live) {
        const TipState state = *net.tip(id);
        const Vec3 pos = net.node(id).pos;

        Vec3 biased = state.heading + params.tropism_weight * field.attractant_gradient(pos) -
                      params.repellent_weight * field.repellent_gradient(pos);
        if (dims == 2) biased[2] = 0.0;
        Vec3 dir = norm(biased) > 1e-12 ? normalized(biased) : normalized(state.heading);
        const Vec3 noise_axis = turn_axis(dir, dims, rng);
        dir = normalized(rotate(dir, noise_axis, params.noise_rad * rng.normal()));
        if (dims == 2) dir[2] = 0.0;

        const Vec3 target = pos + params.step_mm * dir;
        if (!field.growable(target)) {
            TipState& tip = *net.tip(id);
            tip.rejections += 1;
            if (tip.rejections >= kBlockAfterRejections) tip.blocked = true;
            continue;
        }
        if (net.nodes().size() >= params.max_nodes) {
            out.budget_hit = true;
            break;
        }

        const NodeId next = net.add_node(target, NodeKind::tip);
        net.add_strand(id, next);
        net.clear_tip(id);
        if (net.node(id).kind == NodeKind::tip) net.set_kind(id, NodeKind::junction);
        net.set_tip(next, TipState{dir, 0, false});

        const auto cell = field.cell_at(pos);
        const double nutrient = cell ? field.nutrient(*cell) : 0.0;
        const double p = std::min(1.0, params.branching_coefficient * nutrient * boost);
        if (!rng.bernoulli(p)) continue;

        const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
        const Vec3 branch_axis = turn_axis(dir, dims, rng);
        Vec3 branch_dir = normalized(rotate(dir, branch_axis, sign * params.branch_angle_rad));
        if (dims == 2) branch_dir[2] = 0.0;
        const Vec3 branch_pos = pos + params.step_mm * branch_dir;
        if (!field.growable(branch_pos)) continue;
        if (net.nodes().size() >= params.max_nodes) {
            out.budget_hit = true;
            break;
        }
        const NodeId branch = net.add_node(branch_pos, NodeKind::tip);
        net.add_strand(id, branch);
        net.set_tip(branch, TipState{branch_dir, 0, false});
        if (net.node(id).kind == NodeKind::tip) net.set_kind(id, NodeKind::junction);
        ++out.branches;
    }
    net.set_steps_taken(network.steps_taken() + 1);
    return out;
}

MyceliumNetwork default_seed_network(const SubstrateField& field) {
    MyceliumNetwork net(field.dimensions());
    Vec3 centre = 0.5 * field.extent_mm();
    const NodeId origin = net.add_node(centre, NodeKind::fruit_body);
    net.set_tip(origin, TipState{{1.0, 0.0, 0.0}, 0, false});
    return net;
}

GrowthResult grow(const MyceliumNetwork& network, const SubstrateField& field, const GrowthParams& params,
                  std::uint64_t seed) {
    if (params.max_steps == 0) return GrowthResult{network, GrowthStop::zero_budget, 0, 0, {}};
    params.validate();
    check_frame(network, field);

    GrowthResult result;
    result.network = network;
    result.network.set_seed(seed);
    Rng rng(seed);

    result.reason = GrowthStop::max_steps;
    while (result.steps < params.max_steps) {
        if (result.network.nodes().size() >= params.max_nodes) {
            result.reason = GrowthStop::max_nodes;
            break;
        }
        auto step = grow_step(result.network, field, params, rng);
        if (step.no_tips) {
            result.reason = GrowthStop::all_tips_blocked;
            break;
        }
        result.network = std::move(step.network);
        result.branches += step.branches;
        ++result.steps;
        if (step.budget_hit) {
            result.reason = GrowthStop::max_nodes;
            break;
        }
    }

    MyceliumNetwork& net = result.network;
    std::uint64_t fruiting = params.fruiting_tips;
    std::vector<NodeId> tips;
    for (const auto& n : net.nodes()) {
        if (n.kind == NodeKind::tip) tips.push_back(n.id);
    }
    for (NodeId id : tips) {
        if (fruiting == 0) break;
        net.set_kind(id, NodeKind::fruit_body);
        net.clear_tip(id);
        --fruiting;
    }

    std::vector<NodeId> ports;
    for (const auto& n : net.nodes()) {
        if (n.kind == NodeKind::fruit_body && net.degree(n.id) == 0) ports.push_back(n.id);
    }
    for (NodeId port : ports) {
        const Vec3 at = net.node(port).pos;
        std::optional<NodeId> nearest;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& n : net.nodes()) {
            if (n.id == port) continue;
            const double d = distance(at, n.pos);
            if (d > 0.0 && d < best) {
                best = d;
                nearest = n.id;
            }
        }
        if (nearest) {
            net.add_strand(port, *nearest);
            net.clear_tip(port);
        } else {
            result.isolated_ports.push_back(port);
        }
    }
    return result;
}

}  // namespace mycosim
