#pragma once

// Shared test helpers: fixture paths, random generators, and independent
// oracles. Oracles re-derive results from the defining formulas and must
// not call the library routine they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nmface/nmface.hpp"

namespace nmface::test {

inline std::string data_path(const std::string& rel) { return std::string{NMFACE_DATA_DIR} + "/" + rel; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline const std::vector<std::string>& corpus_files() {
    static const std::vector<std::string> files = {
        "corpus/greeting.ann", "corpus/repeat_request.ann", "corpus/apology.ann",
        "corpus/wait.ann", "corpus/farewell.ann",
    };
    return files;
}

inline std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// Random grid with a neutral centre; about a third of the entries are 0.
inline CornerPoseGrid random_grid(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CornerPoseGrid::Poses poses{};
    for (std::size_t c = 0; c < 9; ++c) {
        if (kCorners[c] == Corner{0, 0}) continue;
        UnitArray v{};
        for (double& x : v) x = unit(rng) < 0.33 ? 0.0 : unit(rng);
        poses[c] = ActivationVector::from_values(v);
    }
    return CornerPoseGrid::make("random", 1, poses);
}

inline PleasureArousal random_pa(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> axis(-1.0, 1.0);
    return {axis(rng), axis(rng)};
}

/// Annotation text for a random valid timeline: non-overlapping spans on
/// every track, all within the duration, names from the built-in lexicon.
inline std::string random_annotation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double duration = 0.2 + 4.8 * u01(rng);
    std::string text = "duration " + fmt6(duration) + "\n";
    if (u01(rng) < 0.5) text += "fps " + std::to_string(10 + static_cast<int>(u01(rng) * 50)) + "\n";
    const char* mouth[] = {"pah", "mm", "oo", "cha", "th"};
    const char* brow[] = {"raised", "furrowed", "question", "relaxed"};
    for (const char* track : {"gloss", "emotion", "mouthing", "brows"}) {
        double cursor = 0.0;
        while (true) {
            cursor += u01(rng) * 0.5;
            double len = 0.02 + u01(rng) * 1.2;
            if (cursor + len > duration) break;
            std::string line = std::string{track} + " " + fmt6(cursor) + " " + fmt6(cursor + len) + " ";
            std::string name(track);
            if (name == "gloss") line += "SIGN" + std::to_string(static_cast<int>(u01(rng) * 100));
            else if (name == "emotion") line += "p=" + fmt6(2 * u01(rng) - 1) + " a=" + fmt6(2 * u01(rng) - 1);
            else if (name == "mouthing") line += mouth[static_cast<int>(u01(rng) * 5) % 5];
            else line += brow[static_cast<int>(u01(rng) * 4) % 4];
            if (u01(rng) < 0.7) line += " w=" + fmt6(0.05 + 0.95 * u01(rng));
            if (u01(rng) < 0.7) line += " attack=" + fmt6(u01(rng) * len * 0.7);
            if (u01(rng) < 0.7) line += " release=" + fmt6(u01(rng) * len * 0.7);
            text += line + "\n";
            // Parsed values are rounded to 6 decimals, so leave a gap that
            // survives rounding.
            cursor += len + 1e-5;
        }
    }
    return text;
}

// ---- oracles -------------------------------------------------------------

/// Four-term bilinear formula evaluated literally.
inline UnitArray bilinear_oracle(const PleasureArousal& pa, const CornerPoseGrid& g) {
    int p0 = std::min(static_cast<int>(std::floor(pa.p)), 0);
    int a0 = std::min(static_cast<int>(std::floor(pa.a)), 0);
    int p1 = p0 + 1, a1 = a0 + 1;
    double s = (pa.p - p0) / (p1 - p0);
    double t = (pa.a - a0) / (a1 - a0);
    UnitArray out{};
    for (std::size_t u = 0; u < kUnitCount; ++u) {
        out[u] = (1 - s) * (1 - t) * g.pose(p0, a0).at(u) + s * (1 - t) * g.pose(p1, a0).at(u) +
                 (1 - s) * t * g.pose(p0, a1).at(u) + s * t * g.pose(p1, a1).at(u);
    }
    return out;
}

/// Corner chosen by enumerating all nine and keeping, per axis, the value
/// nearest to the coordinate with ties going to the value farther from 0.
inline Corner nearest_corner_oracle(const PleasureArousal& pa) {
    auto best_axis = [](double x, int c) {
        for (int other : {-1, 0, 1}) {
            if (other == c) continue;
            double dc = std::abs(x - c), doth = std::abs(x - other);
            if (doth < dc) return false;
            if (doth == dc && std::abs(other) > std::abs(c)) return false;
        }
        return true;
    };
    std::vector<Corner> hits;
    for (int cp = -1; cp <= 1; ++cp) {
        for (int ca = -1; ca <= 1; ++ca) {
            if (best_axis(pa.p, cp) && best_axis(pa.a, ca)) hits.push_back({cp, ca});
        }
    }
    return hits.size() == 1 ? hits.front() : Corner{99, 99};
}

/// Sort every row by (distance, row) with a stable sort and cut at k.
inline std::vector<Neighbor> knn_oracle(const Dataset& d, const PleasureArousal& target, std::size_t k) {
    std::vector<Neighbor> all;
    for (const auto& s : d.samples) {
        double dp = s.pa.p - target.p, da = s.pa.a - target.a;
        all.push_back({s.id, std::sqrt(dp * dp + da * da)});
    }
    std::stable_sort(all.begin(), all.end(), [](const Neighbor& x, const Neighbor& y) { return x.distance < y.distance; });
    all.resize(std::min(k, all.size()));
    return all;
}

/// Piecewise envelope written out branch by branch (valid when
/// attack + release <= length).
inline double envelope_oracle(double start, double end, double attack, double release, double weight, double t) {
    if (t <= start || t >= end) return 0.0;
    if (attack > 0 && t < start + attack) return weight * (t - start) / attack;
    if (release > 0 && t > end - release) return weight * (end - t) / release;
    return weight;
}

/// Frame-by-frame compositor using the literal update
/// out += (layer - out) * weight * affinity, then clamping.
inline std::vector<UnitArray> compose_oracle(const Timeline& t, const CornerPoseGrid& g, const PoseLexicon& lex,
                                             const LayerPolicy& policy, int fps, MappingMode mode) {
    std::vector<UnitArray> frames;
    const auto n = static_cast<std::size_t>(std::floor(t.duration * fps + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        double time = static_cast<double>(i) / fps;
        UnitArray out{};
        for (TrackKind k : policy.priority) {
            for (const Span& s : t.track(k)) {
                double w = 0.0;
                if (time > s.start && time < s.end) {
                    double rise = s.envelope.attack > 0 ? (time - s.start) / s.envelope.attack : 1.0;
                    double fall = s.envelope.release > 0 ? (s.end - time) / s.envelope.release : 1.0;
                    w = std::min(1.0, std::min(rise, fall)) * s.weight;
                } else if (time == s.start && s.envelope.attack == 0) {
                    double fall = s.envelope.release > 0 ? (s.end - s.start) / s.envelope.release : 1.0;
                    w = std::min(1.0, fall) * s.weight;
                } else if (time == s.end && s.envelope.release == 0) {
                    // Skipped when another span on the track starts here with a step.
                    bool superseded = false;
                    for (const Span& o : t.track(k)) superseded |= (o.start == time && o.envelope.attack == 0);
                    if (superseded) continue;
                    double rise = s.envelope.attack > 0 ? (s.end - s.start) / s.envelope.attack : 1.0;
                    w = std::min(1.0, rise) * s.weight;
                } else {
                    continue;
                }
                UnitArray v{};
                if (k == TrackKind::emotion) {
                    auto pa = std::get<PleasureArousal>(s.payload);
                    if (mode == MappingMode::continuous) {
                        v = bilinear_oracle(pa, g);
                    } else {
                        v = g.pose(nearest_corner_oracle(pa)).values();
                    }
                } else {
                    v = lex.find(std::get<PoseName>(s.payload).name)->vector.values();
                }
                const auto& aff = policy.affinity.at(k);
                for (std::size_t u = 0; u < kUnitCount; ++u) {
                    double f = w * aff[static_cast<std::size_t>(kInventory[u].region)];
                    out[u] = out[u] + (v[u] - out[u]) * f;
                }
            }
        }
        for (double& x : out) x = std::min(1.0, std::max(0.0, x));
        frames.push_back(out);
    }
    return frames;
}

} // namespace nmface::test
