#pragma once

// Pleasure/arousal -> face pose.
//
// DISCRETE snaps each axis to -1/0/+1 (round half away from zero) and
// returns that grid pose. CONTINUOUS interpolates bilinearly inside the
// quadrant cell containing (p, a), so corners are reproduced exactly and
// every unit stays inside the hull of its four cell-corner values.

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "nmface/error.hpp"
#include "nmface/facs.hpp"
#include "nmface/format.hpp"
#include "nmface/grid.hpp"

namespace nmface {

struct PleasureArousal {
    double p = 0.0;
    double a = 0.0;

    bool in_range() const { return p >= -1.0 && p <= 1.0 && a >= -1.0 && a <= 1.0; }

    friend bool operator==(const PleasureArousal&, const PleasureArousal&) = default;
};

enum class MappingMode { discrete, continuous };

enum class Strictness { strict, lenient };

constexpr std::string_view mode_name(MappingMode m) {
    return m == MappingMode::discrete ? "discrete" : "continuous";
}

inline std::optional<MappingMode> mode_from_name(std::string_view s) {
    if (s == "discrete") return MappingMode::discrete;
    if (s == "continuous") return MappingMode::continuous;
    return std::nullopt;
}

inline std::vector<PleasureArousal> corner_targets() {
    std::vector<PleasureArousal> out;
    out.reserve(kCorners.size());
    for (Corner c : kCorners) out.push_back({static_cast<double>(c.p), static_cast<double>(c.a)});
    return out;
}

inline double pa_distance(const PleasureArousal& x, const PleasureArousal& y) {
    double dp = x.p - y.p;
    double da = x.a - y.a;
    return std::sqrt(dp * dp + da * da);
}

/// Strict: OutOfRange when |p| > 1 or |a| > 1. Lenient: clamps to the square
/// and appends a warning to `warnings` (if given).
inline PleasureArousal checked_pa(PleasureArousal pa, Strictness strictness,
                                  std::vector<Diagnostic>* warnings = nullptr) {
    if (std::isnan(pa.p) || std::isnan(pa.a)) {
        throw Error(ErrorKind::out_of_range, "pleasure/arousal must be finite");
    }
    if (pa.in_range()) return pa;
    std::string what = "(p=" + format6(pa.p) + ", a=" + format6(pa.a) + ") is outside [-1, 1]";
    if (strictness == Strictness::strict) throw Error(ErrorKind::out_of_range, what);
    PleasureArousal clamped{std::clamp(pa.p, -1.0, 1.0), std::clamp(pa.a, -1.0, 1.0)};
    if (warnings) {
        warnings->push_back({Severity::warning, std::string{kind_name(ErrorKind::out_of_range)},
                             what + "; clamped to (p=" + format6(clamped.p) + ", a=" + format6(clamped.a) + ")",
                             std::nullopt});
    }
    return clamped;
}

/// Half away from zero: 0.5 -> 1, -0.5 -> -1.
inline int snap_axis(double x) { return static_cast<int>(std::round(x)); }

inline Corner nearest_corner(const PleasureArousal& pa) { return Corner{snap_axis(pa.p), snap_axis(pa.a)}; }

/// Quadrant cell of the 3x3 grid holding a point, with its local
/// coordinates. Points on an interior edge belong to the cell on the
/// positive side; s and t are in [0, 1].
struct BilinearCell {
    int p0 = 0, p1 = 1, a0 = 0, a1 = 1;
    double s = 0.0;
    double t = 0.0;

    /// Weights of corners (p0,a0), (p1,a0), (p0,a1), (p1,a1).
    std::array<double, 4> weights() const {
        return {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
    }
};

inline BilinearCell bilinear_cell(const PleasureArousal& pa) {
    BilinearCell c;
    c.p0 = pa.p < 0.0 ? -1 : 0;
    c.p1 = c.p0 + 1;
    c.a0 = pa.a < 0.0 ? -1 : 0;
    c.a1 = c.a0 + 1;
    c.s = pa.p - c.p0;
    c.t = pa.a - c.a0;
    return c;
}

/// Interpolates inside a given cell. Exposed separately so callers can
/// evaluate a shared edge from either adjacent cell.
inline ActivationVector bilinear_in_cell(const BilinearCell& cell, const CornerPoseGrid& grid) {
    const auto& v00 = grid.pose(cell.p0, cell.a0).values();
    const auto& v10 = grid.pose(cell.p1, cell.a0).values();
    const auto& v01 = grid.pose(cell.p0, cell.a1).values();
    const auto& v11 = grid.pose(cell.p1, cell.a1).values();
    UnitArray out{};
    for (std::size_t u = 0; u < kUnitCount; ++u) {
        // Nested lerp is the four-term bilinear sum, but exact at s,t in {0,1}
        // and never outside the hull of the corner values.
        double bottom = std::lerp(v00[u], v10[u], cell.s);
        double top = std::lerp(v01[u], v11[u], cell.s);
        out[u] = std::lerp(bottom, top, cell.t);
    }
    return ActivationVector::from_values(out);
}

inline ActivationVector pa_to_pose(PleasureArousal pa, const CornerPoseGrid& grid, MappingMode mode,
                                   Strictness strictness = Strictness::strict,
                                   std::vector<Diagnostic>* warnings = nullptr) {
    pa = checked_pa(pa, strictness, warnings);
    if (mode == MappingMode::discrete) return grid.pose(nearest_corner(pa));
    return bilinear_in_cell(bilinear_cell(pa), grid);
}

} // namespace nmface
