#pragma once

// The 3x3 corner pose grid: one prototype ActivationVector for every
// (pleasure, arousal) combination of -1, 0 and +1. The centre pose is
// neutral by definition.

#include <array>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nmface/error.hpp"
#include "nmface/facs.hpp"
#include "nmface/format.hpp"

namespace nmface {

struct Corner {
    int p = 0;
    int a = 0;

    friend bool operator==(const Corner&, const Corner&) = default;
};

/// Row-major by arousal descending, then pleasure ascending: (-1,1) first,
/// (1,-1) last.
inline constexpr std::array<Corner, 9> kCorners{{
    {-1, 1}, {0, 1}, {1, 1},
    {-1, 0}, {0, 0}, {1, 0},
    {-1, -1}, {0, -1}, {1, -1},
}};

constexpr std::size_t corner_index(Corner c) {
    return static_cast<std::size_t>((1 - c.a) * 3 + (c.p + 1));
}

/// "p,a", the key used in grid JSON.
inline std::string corner_key(Corner c) { return std::to_string(c.p) + ',' + std::to_string(c.a); }

/// "(p,a)" for messages.
inline std::string corner_label(Corner c) { return '(' + corner_key(c) + ')'; }

class CornerPoseGrid {
public:
    using Poses = std::array<ActivationVector, 9>;

    /// All-neutral grid.
    CornerPoseGrid() = default;

    /// Poses indexed by corner_index. Values are snapped to the 6-decimal
    /// lattice; throws InvariantViolation when the centre pose is not neutral.
    static CornerPoseGrid make(std::string name, int version, const Poses& poses) {
        CornerPoseGrid g;
        g.name_ = std::move(name);
        g.version_ = version;
        for (std::size_t i = 0; i < poses.size(); ++i) {
            UnitArray q{};
            for (std::size_t u = 0; u < kUnitCount; ++u) q[u] = quantize6(poses[i].at(u));
            g.poses_[i] = ActivationVector::from_values(q, "poses." + corner_key(kCorners[i]));
        }
        const auto& centre = g.poses_[corner_index({0, 0})];
        for (std::size_t u = 0; u < kUnitCount; ++u) {
            if (centre.at(u) != 0.0) {
                throw Error(ErrorKind::invariant_violation,
                            "centre pose (0,0) must be neutral but " + std::string{kInventory[u].name} +
                                " = " + format6(centre.at(u)),
                            std::nullopt, "poses.0,0." + std::string{kInventory[u].name});
            }
        }
        return g;
    }

    const std::string& name() const noexcept { return name_; }
    int version() const noexcept { return version_; }
    const ActivationVector& pose(Corner c) const { return poses_[corner_index(c)]; }
    const ActivationVector& pose(int p, int a) const { return pose(Corner{p, a}); }
    const Poses& poses() const noexcept { return poses_; }

    friend bool operator==(const CornerPoseGrid&, const CornerPoseGrid&) = default;

private:
    std::string name_ = "neutral";
    int version_ = 1;
    Poses poses_{};
};

namespace detail {

inline std::string json_string(std::string_view s) { return nlohmann::json(std::string{s}).dump(); }

inline std::string unit_list_json() {
    std::string out = "[";
    for (std::size_t i = 0; i < kUnitCount; ++i) {
        if (i) out += ", ";
        out += json_string(kInventory[i].name);
    }
    return out + "]";
}

inline std::string values_json(const UnitArray& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format6(values[i]);
    }
    return out + "]";
}

[[noreturn]] inline void grid_fail(const std::string& msg, std::string path = {}) {
    throw Error(ErrorKind::malformed_grid, msg, std::nullopt, std::move(path));
}

} // namespace detail

/// Canonical grid JSON: keys sorted, units in inventory order, 6-decimal
/// activations.
inline std::string grid_save(const CornerPoseGrid& grid) {
    // Lexicographic key order of "p,a" strings: '-' sorts before digits.
    std::vector<std::pair<std::string, std::size_t>> keyed;
    for (std::size_t i = 0; i < kCorners.size(); ++i) keyed.emplace_back(corner_key(kCorners[i]), i);
    std::sort(keyed.begin(), keyed.end());

    std::string out = "{\n";
    out += "  \"name\": " + detail::json_string(grid.name()) + ",\n";
    out += "  \"poses\": {\n";
    for (std::size_t k = 0; k < keyed.size(); ++k) {
        out += "    " + detail::json_string(keyed[k].first) + ": " +
               detail::values_json(grid.poses()[keyed[k].second].values());
        out += k + 1 < keyed.size() ? ",\n" : "\n";
    }
    out += "  },\n";
    out += "  \"units\": " + detail::unit_list_json() + ",\n";
    out += "  \"version\": " + std::to_string(grid.version()) + "\n";
    out += "}\n";
    return out;
}

/// Reads grid JSON. The unit list may be any subset of the inventory in any
/// order (unlisted units are 0); activations may be numbers or numeric
/// strings. Throws MalformedGrid or InvariantViolation naming the offending
/// path.
inline CornerPoseGrid grid_load(std::string_view source) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error& e) {
        detail::grid_fail(std::string{"invalid JSON: "} + e.what());
    }
    if (!doc.is_object()) detail::grid_fail("grid must be a JSON object");

    for (const char* key : {"name", "version", "units", "poses"}) {
        if (!doc.contains(key)) detail::grid_fail(std::string{"missing key \""} + key + "\"", key);
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "name" && key != "version" && key != "units" && key != "poses") {
            detail::grid_fail("unexpected key \"" + key + "\"", key);
        }
    }
    if (!doc["name"].is_string()) detail::grid_fail("\"name\" must be a string", "name");
    if (!doc["version"].is_number_integer()) detail::grid_fail("\"version\" must be an integer", "version");

    const json& units = doc["units"];
    if (!units.is_array()) detail::grid_fail("\"units\" must be an array", "units");
    std::vector<Unit> columns;
    std::set<Unit> seen;
    for (std::size_t i = 0; i < units.size(); ++i) {
        std::string path = "units[" + std::to_string(i) + "]";
        if (!units[i].is_string()) detail::grid_fail("unit names must be strings", path);
        auto name = units[i].get<std::string>();
        auto u = unit_from_name(name);
        if (!u) detail::grid_fail("unknown unit name '" + name + "'", path);
        if (!seen.insert(*u).second) detail::grid_fail("duplicate unit name '" + name + "'", path);
        columns.push_back(*u);
    }

    const json& poses = doc["poses"];
    if (!poses.is_object()) detail::grid_fail("\"poses\" must be an object", "poses");
    for (const auto& [key, _] : poses.items()) {
        bool known = std::any_of(kCorners.begin(), kCorners.end(),
                                 [&](Corner c) { return corner_key(c) == key; });
        if (!known) detail::grid_fail("unexpected pose key \"" + key + "\"", "poses." + key);
    }

    CornerPoseGrid::Poses vectors{};
    for (Corner c : kCorners) {
        const std::string key = corner_key(c);
        const std::string path = "poses." + key;
        if (!poses.contains(key)) detail::grid_fail("missing corner " + corner_label(c), path);
        const json& row = poses[key];
        if (!row.is_array() || row.size() != columns.size()) {
            detail::grid_fail("pose " + corner_label(c) + " must be an array of " +
                                  std::to_string(columns.size()) + " activations",
                              path);
        }
        UnitArray values{};
        for (std::size_t i = 0; i < columns.size(); ++i) {
            std::string vpath = path + "." + std::string{unit_name(columns[i])};
            const json& cell = row[i];
            std::optional<double> v;
            if (cell.is_number()) {
                v = cell.get<double>();
            } else if (cell.is_string()) {
                v = parse_real(cell.get<std::string>());
            }
            if (!v) detail::grid_fail("activation at " + vpath + " is not a number", vpath);
            values[index_of(columns[i])] = quantize6(*v);
        }
        vectors[corner_index(c)] = ActivationVector::from_values(values, path);
    }
    return CornerPoseGrid::make(doc["name"].get<std::string>(), doc["version"].get<int>(), vectors);
}

/// Artist-style default poses over the abstract inventory, loosely following
/// the classic feature descriptions (smile and cheek raise for pleasant,
/// furrowed brow and pressed lips for unpleasant-aroused, drooped corners for
/// unpleasant-calm, wide eyes and open mouth for aroused).
inline CornerPoseGrid builtin_grid() {
    using U = Unit;
    auto pose = [](std::initializer_list<std::pair<U, double>> entries) {
        UnitArray v{};
        for (auto [u, x] : entries) v[index_of(u)] = x;
        return ActivationVector::from_values(v);
    };
    CornerPoseGrid::Poses poses{};
    poses[corner_index({-1, 1})] = pose({{U::brow_lowerer, 0.8}, {U::upper_lid_raiser, 0.4},
                                         {U::lid_tightener, 0.6}, {U::nose_wrinkler, 0.3},
                                         {U::chin_raiser, 0.4}, {U::lip_stretcher, 0.3},
                                         {U::lip_pressor, 0.6}});
    poses[corner_index({0, 1})] = pose({{U::inner_brow_raiser, 0.7}, {U::outer_brow_raiser, 0.7},
                                        {U::upper_lid_raiser, 0.8}, {U::eyes_widener, 0.7},
                                        {U::lips_part, 0.5}, {U::jaw_drop, 0.4},
                                        {U::mouth_stretch, 0.2}});
    poses[corner_index({1, 1})] = pose({{U::inner_brow_raiser, 0.2}, {U::outer_brow_raiser, 0.3},
                                        {U::upper_lid_raiser, 0.3}, {U::eyes_widener, 0.3},
                                        {U::cheek_raiser, 0.7}, {U::lip_corner_puller, 0.9},
                                        {U::lips_part, 0.4}, {U::jaw_drop, 0.2}});
    poses[corner_index({-1, 0})] = pose({{U::brow_lowerer, 0.5}, {U::nose_wrinkler, 0.5},
                                         {U::upper_lip_raiser, 0.5}, {U::lip_corner_depressor, 0.3}});
    poses[corner_index({1, 0})] = pose({{U::cheek_raiser, 0.5}, {U::infraorbital_tightener, 0.2},
                                        {U::lip_corner_puller, 0.7}});
    poses[corner_index({-1, -1})] = pose({{U::inner_brow_raiser, 0.6}, {U::brow_lowerer, 0.3},
                                          {U::lid_tightener, 0.3}, {U::lip_corner_depressor, 0.7},
                                          {U::chin_raiser, 0.4}});
    poses[corner_index({0, -1})] = pose({{U::lid_tightener, 0.4}, {U::lip_corner_depressor, 0.1}});
    poses[corner_index({1, -1})] = pose({{U::lid_tightener, 0.2}, {U::cheek_raiser, 0.2},
                                         {U::lip_corner_puller, 0.35}});
    return CornerPoseGrid::make("builtin", 1, poses);
}

} // namespace nmface
