#pragma once

// Named mouthing and brow poses. Lexicon JSON: {"name": {"unit": value, ...}, ...};
// unlisted units are 0. Which region a name may touch depends on the track
// that uses it, so region checks happen at lookup.

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nmface/error.hpp"
#include "nmface/facs.hpp"
#include "nmface/format.hpp"

namespace nmface {

class PoseLexicon {
public:
    struct Entry {
        ActivationVector vector;
        std::vector<Unit> listed;  // units named in the source, in inventory order

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    void add(std::string name, const std::map<Unit, double>& values) {
        UnitArray dense{};
        Entry e;
        for (auto [u, v] : values) {
            dense[index_of(u)] = quantize6(v);
            e.listed.push_back(u);
        }
        e.vector = ActivationVector::from_values(dense, name);
        entries_.insert_or_assign(std::move(name), std::move(e));
    }

    bool contains(std::string_view name) const { return entries_.find(name) != entries_.end(); }

    const Entry* find(std::string_view name) const {
        auto it = entries_.find(name);
        return it == entries_.end() ? nullptr : &it->second;
    }

    /// Looks up `name` for use on a track confined to `region`. Throws
    /// UnknownPose or RegionMismatch.
    const ActivationVector& resolve(std::string_view name, Region region,
                                    std::optional<SourceLoc> loc = std::nullopt) const {
        const Entry* e = find(name);
        if (!e) {
            throw Error(ErrorKind::unknown_pose, "unknown pose '" + std::string{name} + "'", loc,
                        std::string{name});
        }
        for (Unit u : e->listed) {
            if (unit_region(u) != region) {
                throw Error(ErrorKind::region_mismatch,
                            "pose '" + std::string{name} + "' sets " + std::string{unit_name(u)} + " (" +
                                std::string{region_name(unit_region(u))} + " face) but is used on a " +
                                std::string{region_name(region)} + "-face track",
                            loc, std::string{name});
            }
        }
        return e->vector;
    }

    const std::map<std::string, Entry, std::less<>>& entries() const noexcept { return entries_; }

    friend bool operator==(const PoseLexicon&, const PoseLexicon&) = default;

private:
    std::map<std::string, Entry, std::less<>> entries_;
};

namespace detail {
[[noreturn]] inline void lexicon_fail(const std::string& msg, std::string path = {}) {
    throw Error(ErrorKind::malformed_lexicon, msg, std::nullopt, std::move(path));
}
} // namespace detail

inline PoseLexicon lexicon_load(std::string_view source) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error& e) {
        detail::lexicon_fail(std::string{"invalid JSON: "} + e.what());
    }
    if (!doc.is_object()) detail::lexicon_fail("lexicon must be a JSON object");
    PoseLexicon lex;
    for (const auto& [name, body] : doc.items()) {
        if (name.empty() || name.find_first_of(" \t#") != std::string::npos) {
            detail::lexicon_fail("pose name '" + name + "' must be non-empty without whitespace or '#'", name);
        }
        if (!body.is_object()) detail::lexicon_fail("pose '" + name + "' must map unit names to values", name);
        std::map<Unit, double> values;
        for (const auto& [unit, value] : body.items()) {
            std::string path = name + "." + unit;
            auto u = unit_from_name(unit);
            if (!u) detail::lexicon_fail("unknown unit name '" + unit + "'", path);
            std::optional<double> v;
            if (value.is_number()) v = value.get<double>();
            else if (value.is_string()) v = parse_real(value.get<std::string>());
            if (!v) detail::lexicon_fail("value at " + path + " is not a number", path);
            if (!(*v >= 0.0 && *v <= 1.0)) detail::lexicon_fail("value at " + path + " = " + format6(*v) + " is outside [0, 1]", path);
            values[*u] = *v;
        }
        lex.add(name, values);
    }
    return lex;
}

/// Canonical lexicon JSON (names sorted, units in inventory order, 6 decimals).
inline std::string lexicon_save(const PoseLexicon& lex) {
    auto quote = [](std::string_view s) { return nlohmann::json(std::string{s}).dump(); };
    std::string out = "{\n";
    std::size_t n = 0;
    for (const auto& [name, entry] : lex.entries()) {
        out += "  " + quote(name) + ": {";
        for (std::size_t i = 0; i < entry.listed.size(); ++i) {
            if (i) out += ", ";
            out += quote(unit_name(entry.listed[i])) + ": " + format6(entry.vector[entry.listed[i]]);
        }
        out += ++n < lex.entries().size() ? "},\n" : "}\n";
    }
    out += "}\n";
    return out;
}

/// Small default lexicon: a few lexical mouth actions and brow postures.
inline PoseLexicon builtin_lexicon() {
    using U = Unit;
    PoseLexicon lex;
    lex.add("pah", {{U::lips_part, 0.9}, {U::jaw_drop, 0.6}, {U::lip_stretcher, 0.2}});
    lex.add("mm", {{U::lip_pressor, 0.8}, {U::chin_raiser, 0.2}});
    lex.add("oo", {{U::lip_puckerer, 0.9}, {U::lips_part, 0.3}});
    lex.add("cha", {{U::lips_part, 0.7}, {U::jaw_drop, 0.5}, {U::lip_stretcher, 0.4}});
    lex.add("th", {{U::lips_part, 0.4}, {U::jaw_drop, 0.2}, {U::lower_lip_depressor, 0.3}});
    lex.add("raised", {{U::inner_brow_raiser, 0.8}, {U::outer_brow_raiser, 0.8}});
    lex.add("furrowed", {{U::brow_lowerer, 0.8}, {U::lid_tightener, 0.2}});
    lex.add("question", {{U::inner_brow_raiser, 0.9}, {U::outer_brow_raiser, 0.9}, {U::upper_lid_raiser, 0.4}});
    lex.add("relaxed", {});
    return lex;
}

} // namespace nmface
