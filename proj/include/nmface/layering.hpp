#pragma once

// Compositor: evaluates every channel of a Timeline at fixed sample times
// and blends the channels over a neutral face.
//
// Each active layer pulls the running result toward its own vector,
//     out[u] = lerp(out[u], layer[u], weight * affinity(kind, region(u))),
// in policy priority order (low -> high). With the default policy the
// mouthing channel owns the lower face, brows own the upper face, and the
// emotion pose shows through wherever those channels are absent or fading.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nmface/emotion.hpp"
#include "nmface/error.hpp"
#include "nmface/facs.hpp"
#include "nmface/format.hpp"
#include "nmface/grid.hpp"
#include "nmface/lexicon.hpp"
#include "nmface/notation.hpp"

namespace nmface {

/// Blend factor per region, indexed by Region.
using RegionFactors = std::array<double, 3>;

struct LayerPolicy {
    std::vector<TrackKind> priority;               // low -> high; every non-gloss kind once
    std::map<TrackKind, RegionFactors> affinity;

    static LayerPolicy defaults() {
        LayerPolicy p;
        p.priority = {TrackKind::emotion, TrackKind::brows, TrackKind::mouthing};
        p.affinity[TrackKind::emotion] = {1.0, 1.0, 1.0};
        p.affinity[TrackKind::mouthing] = {0.0, 0.0, 1.0};
        p.affinity[TrackKind::brows] = {1.0, 0.0, 0.0};
        return p;
    }

    std::optional<std::size_t> rank(TrackKind k) const {
        auto it = std::find(priority.begin(), priority.end(), k);
        if (it == priority.end()) return std::nullopt;
        return static_cast<std::size_t>(it - priority.begin());
    }

    double factor(TrackKind k, Region r) const {
        auto it = affinity.find(k);
        if (it == affinity.end()) {
            throw Error(ErrorKind::unknown_track_kind,
                        "layer policy has no affinity for track '" + std::string{track_name(k)} + "'");
        }
        return it->second[static_cast<std::size_t>(r)];
    }

    friend bool operator==(const LayerPolicy&, const LayerPolicy&) = default;
};

namespace detail {
[[noreturn]] inline void policy_fail(const std::string& msg) { throw Error(ErrorKind::malformed_policy, msg); }
} // namespace detail

/// Throws MalformedPolicy unless every non-gloss kind appears exactly once
/// in the priority order and every affinity lies in [0, 1].
inline void check_policy(const LayerPolicy& p) {
    for (TrackKind k : kTrackKinds) {
        auto n = std::count(p.priority.begin(), p.priority.end(), k);
        if (k == TrackKind::gloss) {
            if (n != 0) detail::policy_fail("gloss carries no activation and cannot be layered");
            continue;
        }
        if (n != 1) detail::policy_fail("track '" + std::string{track_name(k)} + "' must appear exactly once in the priority order");
        if (!p.affinity.count(k)) detail::policy_fail("missing affinity for track '" + std::string{track_name(k)} + "'");
    }
    for (const auto& [k, f] : p.affinity) {
        for (double x : f) {
            if (!(x >= 0.0 && x <= 1.0)) detail::policy_fail("affinity for '" + std::string{track_name(k)} + "' outside [0, 1]");
        }
    }
}

/// Policy JSON: {"priority": ["emotion", "brows", "mouthing"],
///               "affinity": {"mouthing": {"upper": 0, "mid": 0.2, "lower": 1}, ...}}
/// Both keys are optional; missing parts keep their defaults.
inline LayerPolicy policy_load(std::string_view source) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(source);
    } catch (const json::parse_error& e) {
        detail::policy_fail(std::string{"invalid JSON: "} + e.what());
    }
    if (!doc.is_object()) detail::policy_fail("policy must be a JSON object");
    LayerPolicy p = LayerPolicy::defaults();
    for (const auto& [key, value] : doc.items()) {
        if (key == "priority") {
            if (!value.is_array()) detail::policy_fail("\"priority\" must be an array of track names");
            p.priority.clear();
            for (const auto& item : value) {
                auto k = item.is_string() ? track_from_name(item.get<std::string>()) : std::nullopt;
                if (!k) detail::policy_fail("unknown track kind in \"priority\": " + item.dump());
                p.priority.push_back(*k);
            }
        } else if (key == "affinity") {
            if (!value.is_object()) detail::policy_fail("\"affinity\" must be an object");
            for (const auto& [track, regions] : value.items()) {
                auto k = track_from_name(track);
                if (!k || *k == TrackKind::gloss) detail::policy_fail("unknown track kind in \"affinity\": " + track);
                if (!regions.is_object()) detail::policy_fail("affinity for '" + track + "' must be an object");
                RegionFactors f = p.affinity[*k];
                for (const auto& [region, factor] : regions.items()) {
                    auto r = std::find_if(kRegions.begin(), kRegions.end(),
                                          [&](Region x) { return region_name(x) == region; });
                    if (r == kRegions.end()) detail::policy_fail("unknown region '" + region + "'");
                    if (!factor.is_number()) detail::policy_fail("affinity " + track + "." + region + " must be a number");
                    f[static_cast<std::size_t>(*r)] = factor.get<double>();
                }
                p.affinity[*k] = f;
            }
        } else {
            detail::policy_fail("unexpected key \"" + key + "\"");
        }
    }
    check_policy(p);
    return p;
}

/// Onset/apex/offset weight: 0 outside (start, end), linear attack and
/// release ramps, scaled by span.weight. When attack + release exceeds the
/// span the ramps meet below full weight.
inline double envelope_eval(const Span& span, double t) {
    if (!(t > span.start && t < span.end)) return 0.0;
    double rise = span.envelope.attack > 0.0 ? (t - span.start) / span.envelope.attack : 1.0;
    double fall = span.envelope.release > 0.0 ? (span.end - t) / span.envelope.release : 1.0;
    double shape = std::min({1.0, rise, fall});
    return shape * span.weight;
}

struct Layer {
    ActivationVector vector;
    double weight = 0.0;
    TrackKind kind = TrackKind::emotion;
};

/// Applies `layers` in the order given (callers sort them by policy
/// priority) and clamps the result. Throws UnknownTrackKind for a kind the
/// policy does not rank.
inline ActivationVector blend_layers(const ActivationVector& base, const std::vector<Layer>& layers,
                                     const LayerPolicy& policy) {
    UnitArray out = base.values();
    for (const Layer& layer : layers) {
        if (!policy.rank(layer.kind)) {
            throw Error(ErrorKind::unknown_track_kind,
                        "track '" + std::string{track_name(layer.kind)} + "' is not in the layer policy");
        }
        std::array<double, 3> amount{};
        for (Region r : kRegions) amount[static_cast<std::size_t>(r)] = layer.weight * policy.factor(layer.kind, r);
        for (std::size_t u = 0; u < kUnitCount; ++u) {
            double f = amount[static_cast<std::size_t>(kInventory[u].region)];
            out[u] = std::lerp(out[u], layer.vector.values()[u], f);
        }
    }
    return vector_clamp(out);
}

struct SampledCurve {
    int fps = 30;
    std::vector<ActivationVector> frames;

    double time_at(std::size_t i) const { return static_cast<double>(i) / fps; }

    friend bool operator==(const SampledCurve&, const SampledCurve&) = default;
};

inline constexpr int kDefaultFps = 30;

/// floor(duration * fps) + 1, tolerant of binary rounding just below an
/// integer product.
inline std::size_t frame_count(double duration, int fps) {
    return static_cast<std::size_t>(std::floor(duration * fps + 1e-9)) + 1;
}

struct ActiveSpan {
    const Span* span = nullptr;
    double weight = 0.0;
};

/// Span of one track that drives the frame at time t, and its weight.
/// Inside (start, end) this is envelope_eval. A zero-length attack or
/// release is a step edge, so the closed endpoint takes the one-sided limit;
/// when one span ends and the next begins at t, the starting span wins.
inline ActiveSpan active_span(const std::vector<Span>& spans, double t) {
    auto it = std::upper_bound(spans.begin(), spans.end(), t,
                               [](double x, const Span& s) { return x < s.start; });
    if (it != spans.begin()) {
        const Span& s = *std::prev(it);
        if (t > s.start && t < s.end) return {&s, envelope_eval(s, t)};
        if (t == s.start && s.envelope.attack == 0.0) {
            double fall = s.envelope.release > 0.0 ? s.length() / s.envelope.release : 1.0;
            return {&s, std::min(1.0, fall) * s.weight};
        }
        if (std::prev(it) != spans.begin()) {
            const Span& before = *std::prev(it, 2);
            if (t == before.end && before.envelope.release == 0.0) {
                double rise = before.envelope.attack > 0.0 ? before.length() / before.envelope.attack : 1.0;
                return {&before, std::min(1.0, rise) * before.weight};
            }
        }
        if (t == s.end && s.envelope.release == 0.0) {
            double rise = s.envelope.attack > 0.0 ? s.length() / s.envelope.attack : 1.0;
            return {&s, std::min(1.0, rise) * s.weight};
        }
    }
    return {};
}

struct SampleOptions {
    MappingMode mode = MappingMode::continuous;
    Strictness strictness = Strictness::strict;
};

/// Evaluates the timeline at t_i = i / fps. Gloss spans are timing
/// references only. Throws UnknownPose / RegionMismatch / OutOfRange.
inline SampledCurve sample_timeline(const Timeline& t, const CornerPoseGrid& grid, const PoseLexicon& lexicon,
                                    const LayerPolicy& policy, int fps, const SampleOptions& opts = {},
                                    std::vector<Diagnostic>* warnings = nullptr) {
    if (fps <= 0) throw Error(ErrorKind::range_error, "fps must be positive, got " + std::to_string(fps));
    check_policy(policy);

    // Payload vectors depend only on the span, so resolve them once.
    std::array<std::vector<ActivationVector>, 4> resolved;
    for (TrackKind k : kTrackKinds) {
        if (k == TrackKind::gloss) continue;
        for (const Span& s : t.track(k)) {
            std::optional<SourceLoc> loc;
            if (s.loc.line > 0) loc = s.loc;
            if (!payload_matches(k, s.payload)) {
                throw Error(ErrorKind::invariant_violation,
                            describe_span(k, s) + " has a payload of the wrong kind", loc);
            }
            ActivationVector v;
            if (k == TrackKind::emotion) {
                try {
                    v = pa_to_pose(std::get<PleasureArousal>(s.payload), grid, opts.mode, opts.strictness, warnings);
                } catch (const Error& e) {
                    throw Error(e.kind(), describe_span(k, s) + ": " + e.what(), loc);
                }
            } else {
                v = lexicon.resolve(std::get<PoseName>(s.payload).name, *track_region(k), loc);
            }
            resolved[static_cast<std::size_t>(k)].push_back(v);
        }
    }

    SampledCurve curve;
    curve.fps = fps;
    const std::size_t n = frame_count(t.duration, fps);
    curve.frames.reserve(n);
    std::vector<Layer> layers;
    for (std::size_t i = 0; i < n; ++i) {
        const double time = curve.time_at(i);
        layers.clear();
        for (TrackKind k : policy.priority) {
            const auto& spans = t.track(k);
            ActiveSpan active = active_span(spans, time);
            if (!active.span || active.weight <= 0.0) continue;
            auto idx = static_cast<std::size_t>(active.span - spans.data());
            layers.push_back({resolved[static_cast<std::size_t>(k)][idx], active.weight, k});
        }
        curve.frames.push_back(blend_layers(ActivationVector{}, layers, policy));
    }
    return curve;
}

enum class CurveFormat { json, csv };

inline std::optional<CurveFormat> curve_format_from_name(std::string_view s) {
    if (s == "json") return CurveFormat::json;
    if (s == "csv") return CurveFormat::csv;
    return std::nullopt;
}

/// JSON: {"fps": n, "units": [...], "frames": [[...], ...]}, one frame per
/// line. CSV: "time,<units...>" header then one row per frame. All values
/// with 6 decimals.
inline std::string export_curves(const SampledCurve& c, CurveFormat format) {
    std::string out;
    if (format == CurveFormat::csv) {
        out = "time";
        for (const auto& info : kInventory) {
            out += ',';
            out += info.name;
        }
        out += '\n';
        for (std::size_t i = 0; i < c.frames.size(); ++i) {
            out += format6(c.time_at(i));
            for (double v : c.frames[i].values()) {
                out += ',';
                out += format6(v);
            }
            out += '\n';
        }
        return out;
    }
    out = "{\n  \"fps\": " + std::to_string(c.fps) + ",\n  \"units\": " + detail::unit_list_json() +
          ",\n  \"frames\": [";
    for (std::size_t i = 0; i < c.frames.size(); ++i) {
        out += i ? ",\n    " : "\n    ";
        out += detail::values_json(c.frames[i].values());
    }
    out += c.frames.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return out;
}

} // namespace nmface
