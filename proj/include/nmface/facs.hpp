#pragma once

// Abstract facial control-unit inventory and activation vectors.
//
// The inventory is a fixed set of 20 FACS-inspired units, each assigned to
// one facial region. An ActivationVector is dense over the inventory with
// every level in [0, 1]; 0 is neutral.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "nmface/error.hpp"
#include "nmface/format.hpp"

namespace nmface {

enum class Region : std::uint8_t { upper, mid, lower };

inline constexpr std::array<Region, 3> kRegions{Region::upper, Region::mid, Region::lower};

constexpr std::string_view region_name(Region r) {
    switch (r) {
    case Region::upper: return "upper";
    case Region::mid: return "mid";
    case Region::lower: return "lower";
    }
    return "?";
}

enum class Unit : std::uint8_t {
    inner_brow_raiser,
    outer_brow_raiser,
    brow_lowerer,
    upper_lid_raiser,
    lid_tightener,
    eyes_widener,
    nose_wrinkler,
    cheek_raiser,
    infraorbital_tightener,
    upper_lip_raiser,
    lip_corner_puller,
    lip_corner_depressor,
    lower_lip_depressor,
    chin_raiser,
    lip_puckerer,
    lip_stretcher,
    lip_pressor,
    lips_part,
    jaw_drop,
    mouth_stretch,
};

inline constexpr std::size_t kUnitCount = 20;

struct UnitInfo {
    std::string_view name;
    Region region;
};

/// Canonical inventory order; serialized unit lists always follow it.
inline constexpr std::array<UnitInfo, kUnitCount> kInventory{{
    {"inner_brow_raiser", Region::upper},
    {"outer_brow_raiser", Region::upper},
    {"brow_lowerer", Region::upper},
    {"upper_lid_raiser", Region::upper},
    {"lid_tightener", Region::upper},
    {"eyes_widener", Region::upper},
    {"nose_wrinkler", Region::mid},
    {"cheek_raiser", Region::mid},
    {"infraorbital_tightener", Region::mid},
    {"upper_lip_raiser", Region::lower},
    {"lip_corner_puller", Region::lower},
    {"lip_corner_depressor", Region::lower},
    {"lower_lip_depressor", Region::lower},
    {"chin_raiser", Region::lower},
    {"lip_puckerer", Region::lower},
    {"lip_stretcher", Region::lower},
    {"lip_pressor", Region::lower},
    {"lips_part", Region::lower},
    {"jaw_drop", Region::lower},
    {"mouth_stretch", Region::lower},
}};

constexpr std::size_t index_of(Unit u) { return static_cast<std::size_t>(u); }
constexpr Unit unit_at(std::size_t i) { return static_cast<Unit>(i); }
constexpr std::string_view unit_name(Unit u) { return kInventory[index_of(u)].name; }
constexpr Region unit_region(Unit u) { return kInventory[index_of(u)].region; }

inline std::optional<Unit> unit_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kUnitCount; ++i) {
        if (kInventory[i].name == name) return unit_at(i);
    }
    return std::nullopt;
}

using UnitArray = std::array<double, kUnitCount>;

class ActivationVector {
public:
    /// Neutral (all zeros).
    constexpr ActivationVector() = default;

    /// Throws InvariantViolation when a value is outside [0, 1] or not finite.
    static ActivationVector from_values(const UnitArray& values, std::string_view context = {}) {
        for (std::size_t i = 0; i < kUnitCount; ++i) {
            double v = values[i];
            if (!(v >= 0.0 && v <= 1.0)) {
                std::string where = context.empty() ? std::string{} : std::string{context} + ": ";
                throw Error(ErrorKind::invariant_violation,
                            where + std::string{kInventory[i].name} + " = " + format6(v) +
                                " is outside [0, 1]",
                            std::nullopt, std::string{context});
            }
        }
        ActivationVector out;
        out.values_ = values;
        return out;
    }

    double operator[](Unit u) const { return values_[index_of(u)]; }
    double at(std::size_t i) const { return values_.at(i); }
    const UnitArray& values() const noexcept { return values_; }

    bool is_neutral() const {
        return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
    }

    /// Copy with one unit replaced; same range checking as from_values.
    ActivationVector with(Unit u, double v) const {
        UnitArray vals = values_;
        vals[index_of(u)] = v;
        return from_values(vals);
    }

    friend bool operator==(const ActivationVector&, const ActivationVector&) = default;

private:
    UnitArray values_{};
};

/// min(1, max(0, v)) per unit. NaN maps to 0.
inline ActivationVector vector_clamp(const UnitArray& raw) {
    UnitArray out{};
    for (std::size_t i = 0; i < kUnitCount; ++i) {
        out[i] = std::min(1.0, std::max(0.0, raw[i]));
        if (std::isnan(raw[i])) out[i] = 0.0;
    }
    return ActivationVector::from_values(out);
}

/// Named-unit form. Throws MissingUnit unless every inventory unit is
/// present, UnknownUnit for names outside the inventory.
inline ActivationVector vector_clamp(const std::map<std::string, double, std::less<>>& raw) {
    UnitArray dense{};
    std::array<bool, kUnitCount> seen{};
    for (const auto& [name, value] : raw) {
        auto u = unit_from_name(name);
        if (!u) throw Error(ErrorKind::unknown_unit, "unknown control unit '" + name + "'", std::nullopt, name);
        dense[index_of(*u)] = value;
        seen[index_of(*u)] = true;
    }
    for (std::size_t i = 0; i < kUnitCount; ++i) {
        if (!seen[i]) {
            throw Error(ErrorKind::missing_unit,
                        "vector is missing control unit '" + std::string{kInventory[i].name} + "'",
                        std::nullopt, std::string{kInventory[i].name});
        }
    }
    return vector_clamp(dense);
}

} // namespace nmface
