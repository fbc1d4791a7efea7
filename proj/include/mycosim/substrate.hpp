#pragma once

#include "mycosim/common.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace mycosim {

enum class CellState : std::uint8_t { growable = 0, forbidden = 1 };

/**
 * Static chemical landscape the mycelium grows through: nutrient,
 * chemoattractant and chemorepellent concentrations plus a template mask.
 * Cell (i, j, k) covers [i*h, (i+1)*h) x [j*h, (j+1)*h) x [k*h, (k+1)*h) mm.
 * A 2D field has nz == 1 and all positions live in the z = 0 plane.
 */
class SubstrateField {
public:
    SubstrateField(std::size_t nx, std::size_t ny, std::size_t nz, double cell_mm);

    std::size_t nx() const noexcept { return nx_; }
    std::size_t ny() const noexcept { return ny_; }
    std::size_t nz() const noexcept { return nz_; }
    std::size_t cell_count() const noexcept { return nx_ * ny_ * nz_; }
    double cell_mm() const noexcept { return cell_mm_; }
    int dimensions() const noexcept { return nz_ == 1 ? 2 : 3; }
    Vec3 extent_mm() const noexcept;

    std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const noexcept {
        return (k * ny_ + j) * nx_ + i;
    }

    /// Cell containing a position, or nullopt when outside the grid.
    std::optional<std::size_t> cell_at(const Vec3& pos) const noexcept;
    bool growable(const Vec3& pos) const noexcept;

    double nutrient(std::size_t cell) const { return nutrient_.at(cell); }
    double attractant(std::size_t cell) const { return attractant_.at(cell); }
    double repellent(std::size_t cell) const { return repellent_.at(cell); }
    CellState mask(std::size_t cell) const { return mask_.at(cell); }

    void set_nutrient(std::size_t cell, double value);
    void set_attractant(std::size_t cell, double value);
    void set_repellent(std::size_t cell, double value);
    void set_mask(std::size_t cell, CellState state) { mask_.at(cell) = state; }

    void fill_nutrient(double value);
    void fill_attractant(double value);
    void fill_repellent(double value);

    /// Central-difference gradient (per mm) of the attractant field at the cell holding pos.
    Vec3 attractant_gradient(const Vec3& pos) const;
    Vec3 repellent_gradient(const Vec3& pos) const;

    const std::vector<double>& nutrient_values() const noexcept { return nutrient_; }
    const std::vector<double>& attractant_values() const noexcept { return attractant_; }
    const std::vector<double>& repellent_values() const noexcept { return repellent_; }
    const std::vector<CellState>& mask_values() const noexcept { return mask_; }

    friend bool operator==(const SubstrateField&, const SubstrateField&) = default;

private:
    Vec3 gradient(const std::vector<double>& values, const Vec3& pos) const;

    std::size_t nx_, ny_, nz_;
    double cell_mm_;
    std::vector<double> nutrient_, attractant_, repellent_;
    std::vector<CellState> mask_;
};

/**
 * Text format `myceliumsim/substrate/v1`:
 *
 *     myceliumsim/substrate/v1
 *     dims <nx> <ny> <nz>
 *     cell_mm <h>
 *     fill <nutrient|attractant|repellent> <value>      (optional)
 *     <nutrient|attractant|repellent|mask>              (optional block)
 *     <nx values>   one line per (j, k) row, k-major then j
 *
 * Mask values are 0 (growable) or 1 (forbidden). Blank lines and `#` comments
 * are ignored.
 */
SubstrateField load_substrate(const std::filesystem::path& path);
SubstrateField parse_substrate(const std::string& text);
void save_substrate(const SubstrateField& field, const std::filesystem::path& path);
std::string format_substrate(const SubstrateField& field);

}  // namespace mycosim
