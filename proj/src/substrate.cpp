#include "mycosim/substrate.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <string>

namespace mycosim {

namespace {

void check_concentration(double value, const char* what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw DomainError(std::string(what) + " concentration must lie in [0,1], got " + std::to_string(value));
    }
}

}  // namespace

SubstrateField::SubstrateField(std::size_t nx, std::size_t ny, std::size_t nz, double cell_mm)
    : nx_(nx), ny_(ny), nz_(nz), cell_mm_(cell_mm) {
    if (nx == 0 || ny == 0 || nz == 0) throw DomainError("substrate grid needs at least one cell per axis");
    if (!(cell_mm > 0.0)) throw DomainError("substrate cell size must be positive");
    const auto n = cell_count();
    nutrient_.assign(n, 0.0);
    attractant_.assign(n, 0.0);
    repellent_.assign(n, 0.0);
    mask_.assign(n, CellState::growable);
}

Vec3 SubstrateField::extent_mm() const noexcept {
    return {static_cast<double>(nx_) * cell_mm_, static_cast<double>(ny_) * cell_mm_,
            nz_ == 1 ? 0.0 : static_cast<double>(nz_) * cell_mm_};
}

std::optional<std::size_t> SubstrateField::cell_at(const Vec3& pos) const noexcept {
    const double fi = std::floor(pos[0] / cell_mm_);
    const double fj = std::floor(pos[1] / cell_mm_);
    double fk = 0.0;
    if (nz_ > 1) {
        fk = std::floor(pos[2] / cell_mm_);
    } else if (pos[2] != 0.0) {
        return std::nullopt;
    }
    if (fi < 0 || fj < 0 || fk < 0) return std::nullopt;
    if (fi >= static_cast<double>(nx_) || fj >= static_cast<double>(ny_) || fk >= static_cast<double>(nz_)) {
        return std::nullopt;
    }
    return index(static_cast<std::size_t>(fi), static_cast<std::size_t>(fj), static_cast<std::size_t>(fk));
}

bool SubstrateField::growable(const Vec3& pos) const noexcept {
    const auto cell = cell_at(pos);
    return cell && mask_[*cell] == CellState::growable;
}

void SubstrateField::set_nutrient(std::size_t cell, double value) {
    check_concentration(value, "nutrient");
    nutrient_.at(cell) = value;
}

void SubstrateField::set_attractant(std::size_t cell, double value) {
    check_concentration(value, "attractant");
    attractant_.at(cell) = value;
}

void SubstrateField::set_repellent(std::size_t cell, double value) {
    check_concentration(value, "repellent");
    repellent_.at(cell) = value;
}

void SubstrateField::fill_nutrient(double value) {
    check_concentration(value, "nutrient");
    std::fill(nutrient_.begin(), nutrient_.end(), value);
}

void SubstrateField::fill_attractant(double value) {
    check_concentration(value, "attractant");
    std::fill(attractant_.begin(), attractant_.end(), value);
}

void SubstrateField::fill_repellent(double value) {
    check_concentration(value, "repellent");
    std::fill(repellent_.begin(), repellent_.end(), value);
}

Vec3 SubstrateField::attractant_gradient(const Vec3& pos) const { return gradient(attractant_, pos); }
Vec3 SubstrateField::repellent_gradient(const Vec3& pos) const { return gradient(repellent_, pos); }

Vec3 SubstrateField::gradient(const std::vector<double>& values, const Vec3& pos) const {
    const auto cell = cell_at(pos);
    if (!cell) return {0.0, 0.0, 0.0};
    const std::size_t i = *cell % nx_;
    const std::size_t j = (*cell / nx_) % ny_;
    const std::size_t k = *cell / (nx_ * ny_);
    const std::array<std::size_t, 3> at{i, j, k};
    const std::array<std::size_t, 3> dims{nx_, ny_, nz_};

    Vec3 g{0.0, 0.0, 0.0};
    for (int axis = 0; axis < 3; ++axis) {
        if (dims[axis] < 2) continue;
        auto lo = at;
        auto hi = at;
        if (at[axis] > 0) --lo[axis];
        if (at[axis] + 1 < dims[axis]) ++hi[axis];
        const double span = static_cast<double>(hi[axis] - lo[axis]) * cell_mm_;
        g[axis] = (values[index(hi[0], hi[1], hi[2])] - values[index(lo[0], lo[1], lo[2])]) / span;
    }
    return g;
}

// ---------------------------------------------------------------------------
// text format

namespace {

constexpr std::string_view kSubstrateHeader = "myceliumsim/substrate/v1";

}  // namespace

SubstrateField parse_substrate(const std::string& text) {
    using detail::parse_double;
    using detail::parse_u64;

    const auto lines = detail::content_lines(text);
    if (lines.empty() || lines[0].text != kSubstrateHeader) {
        throw ParseError(lines.empty() ? 1 : lines[0].number, "header",
                         "expected '" + std::string(kSubstrateHeader) + "'");
    }

    std::size_t pos = 1;
    auto expect_key = [&](std::string_view key, std::size_t arity) {
        if (pos >= lines.size()) throw ParseError(0, std::string(key), "missing");
        auto toks = detail::split_ws(lines[pos].text);
        if (toks.empty() || toks[0] != key || toks.size() != arity + 1) {
            throw ParseError(lines[pos].number, std::string(key), "expected '" + std::string(key) + "' with " +
                                                                      std::to_string(arity) + " value(s)");
        }
        return toks;
    };

    auto dims = expect_key("dims", 3);
    const auto dims_line = lines[pos].number;
    const auto nx = parse_u64(dims[1], dims_line, "dims");
    const auto ny = parse_u64(dims[2], dims_line, "dims");
    const auto nz = parse_u64(dims[3], dims_line, "dims");
    if (nx == 0 || ny == 0 || nz == 0) throw ParseError(dims_line, "dims", "every axis needs at least one cell");
    if (nx * ny * nz > (std::size_t{1} << 28)) throw ParseError(dims_line, "dims", "grid too large");
    ++pos;

    auto cell = expect_key("cell_mm", 1);
    const double h = parse_double(cell[1], lines[pos].number, "cell_mm");
    if (!(h > 0.0)) throw ParseError(lines[pos].number, "cell_mm", "cell size must be positive");
    ++pos;

    SubstrateField field(nx, ny, nz, h);

    auto setter = [&](std::string_view name, std::size_t line) -> void (SubstrateField::*)(std::size_t, double) {
        if (name == "nutrient") return &SubstrateField::set_nutrient;
        if (name == "attractant") return &SubstrateField::set_attractant;
        if (name == "repellent") return &SubstrateField::set_repellent;
        throw ParseError(line, "section", "unknown field '" + std::string(name) + "'");
    };

    while (pos < lines.size()) {
        const auto toks = detail::split_ws(lines[pos].text);
        const auto line_no = lines[pos].number;
        if (toks[0] == "fill") {
            if (toks.size() != 3) throw ParseError(line_no, "fill", "expected 'fill <field> <value>'");
            const double v = parse_double(toks[2], line_no, "fill");
            if (!(v >= 0.0 && v <= 1.0)) throw ParseError(line_no, std::string(toks[1]), "concentration outside [0,1]");
            const auto set = setter(toks[1], line_no);
            for (std::size_t c = 0; c < field.cell_count(); ++c) (field.*set)(c, v);
            ++pos;
            continue;
        }
        if (toks.size() != 1) throw ParseError(line_no, "section", "expected a section name");
        const std::string section(toks[0]);
        const bool is_mask = section == "mask";
        const auto set = is_mask ? nullptr : setter(toks[0], line_no);
        ++pos;
        for (std::size_t row = 0; row < ny * nz; ++row, ++pos) {
            if (pos >= lines.size()) throw ParseError(0, section, "missing rows (expected " + std::to_string(ny * nz) + ")");
            const auto vals = detail::split_ws(lines[pos].text);
            if (vals.size() != nx) {
                throw ParseError(lines[pos].number, section,
                                 "expected " + std::to_string(nx) + " values, got " + std::to_string(vals.size()));
            }
            for (std::size_t i = 0; i < nx; ++i) {
                const auto c = row * nx + i;
                if (is_mask) {
                    const auto m = parse_u64(vals[i], lines[pos].number, section);
                    if (m > 1) throw ParseError(lines[pos].number, section, "mask values are 0 or 1");
                    field.set_mask(c, m == 0 ? CellState::growable : CellState::forbidden);
                } else {
                    const double v = parse_double(vals[i], lines[pos].number, section);
                    if (!(v >= 0.0 && v <= 1.0)) throw ParseError(lines[pos].number, section, "concentration outside [0,1]");
                    (field.*set)(c, v);
                }
            }
        }
    }
    return field;
}

SubstrateField load_substrate(const std::filesystem::path& path) { return parse_substrate(detail::read_file(path)); }

std::string format_substrate(const SubstrateField& field) {
    std::string out;
    out += kSubstrateHeader;
    out += "\ndims " + std::to_string(field.nx()) + " " + std::to_string(field.ny()) + " " + std::to_string(field.nz());
    out += "\ncell_mm " + detail::format_double(field.cell_mm()) + "\n";

    auto block = [&](const char* name, auto&& value_at) {
        out += name;
        out += '\n';
        for (std::size_t row = 0; row < field.ny() * field.nz(); ++row) {
            for (std::size_t i = 0; i < field.nx(); ++i) {
                if (i) out += ' ';
                out += value_at(row * field.nx() + i);
            }
            out += '\n';
        }
    };
    block("nutrient", [&](std::size_t c) { return detail::format_double(field.nutrient(c)); });
    block("attractant", [&](std::size_t c) { return detail::format_double(field.attractant(c)); });
    block("repellent", [&](std::size_t c) { return detail::format_double(field.repellent(c)); });
    block("mask", [&](std::size_t c) { return std::string(field.mask(c) == CellState::growable ? "0" : "1"); });
    return out;
}

void save_substrate(const SubstrateField& field, const std::filesystem::path& path) {
    detail::write_file(path, format_substrate(field));
}

}  // namespace mycosim
