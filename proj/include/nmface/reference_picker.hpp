#pragma once

// Nearest reference samples for each corner pose: given rows annotated with
// (pleasure, arousal) in [-1, 1], return the k closest rows to a target by
// Euclidean distance. Ties keep dataset row order.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "nmface/emotion.hpp"
#include "nmface/error.hpp"
#include "nmface/format.hpp"
#include "nmface/grid.hpp"

namespace nmface {

struct AnnotatedSample {
    std::string id;
    PleasureArousal pa;

    friend bool operator==(const AnnotatedSample&, const AnnotatedSample&) = default;
};

struct Dataset {
    std::vector<AnnotatedSample> samples;  // ingestion order
    std::string source;
};

struct Neighbor {
    std::string id;
    double distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

} // namespace detail

/// CSV with header "id,pleasure,arousal". Rows keep file order. Empty input
/// (or a header with no rows) gives an empty Dataset. Throws MalformedRow
/// (1-based line number and column name) or DuplicateId.
inline Dataset load_dataset(std::string_view text, std::string source = {}) {
    Dataset d;
    d.source = std::move(source);
    std::set<std::string, std::less<>> ids;
    bool header_seen = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv(line);
        auto bad = [&](const std::string& column, const std::string& why) {
            throw Error(ErrorKind::malformed_row, "row " + std::to_string(line_no) + ", column " + column + ": " + why,
                        SourceLoc{line_no, 1}, column);
        };
        if (!header_seen) {
            if (cells.size() != 3 || cells[0] != "id" || cells[1] != "pleasure" || cells[2] != "arousal") {
                bad("header", "expected header 'id,pleasure,arousal'");
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != 3) bad("*", "expected 3 columns, got " + std::to_string(cells.size()));
        if (cells[0].empty()) bad("id", "empty id");
        AnnotatedSample s;
        s.id = std::string{cells[0]};
        const char* names[] = {"pleasure", "arousal"};
        double vals[2] = {0.0, 0.0};
        for (int c = 0; c < 2; ++c) {
            auto v = parse_real(cells[c + 1]);
            if (!v) bad(names[c], "'" + std::string{cells[c + 1]} + "' is not a number");
            if (*v < -1.0 || *v > 1.0) bad(names[c], format6(*v) + " is outside [-1, 1]");
            vals[c] = *v;
        }
        s.pa = {vals[0], vals[1]};
        if (!ids.insert(s.id).second) {
            throw Error(ErrorKind::duplicate_id, "duplicate id '" + s.id + "' at row " + std::to_string(line_no),
                        SourceLoc{line_no, 1}, s.id);
        }
        d.samples.push_back(std::move(s));
    }
    return d;
}

/// min(k, |d|) nearest samples, ascending distance, ties in dataset order.
inline std::vector<Neighbor> knn_pick(const Dataset& d, const PleasureArousal& target, std::size_t k) {
    if (d.samples.empty()) throw Error(ErrorKind::empty_dataset, "dataset is empty");
    if (k == 0) throw Error(ErrorKind::range_error, "k must be >= 1");
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(d.samples.size());
    for (std::size_t i = 0; i < d.samples.size(); ++i) scored.emplace_back(pa_distance(d.samples[i].pa, target), i);
    const std::size_t n = std::min(k, scored.size());
    // (distance, row) is a total order, so the partial sort is deterministic.
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end());
    std::vector<Neighbor> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({d.samples[scored[i].second].id, scored[i].first});
    return out;
}

struct CornerReferences {
    Corner corner;
    std::vector<Neighbor> neighbors;
};

/// knn_pick for every corner target, in corner order. Samples may appear
/// under several corners.
inline std::vector<CornerReferences> corner_reference_sets(const Dataset& d, std::size_t k = 10) {
    std::vector<CornerReferences> out;
    for (Corner c : kCorners) {
        out.push_back({c, knn_pick(d, {static_cast<double>(c.p), static_cast<double>(c.a)}, k)});
    }
    return out;
}

inline std::string neighbors_json(const std::vector<Neighbor>& ns, std::string_view indent) {
    std::string out = "[";
    for (std::size_t i = 0; i < ns.size(); ++i) {
        out += i ? ",\n" : "\n";
        out += std::string{indent} + "  {\"id\": " + nlohmann::json(ns[i].id).dump() +
               ", \"distance\": " + format6(ns[i].distance) + "}";
    }
    out += ns.empty() ? "]" : "\n" + std::string{indent} + "]";
    return out;
}

/// {"p,a": [{"id": ..., "distance": ...}, ...], ...} in corner order.
inline std::string corner_sets_json(const std::vector<CornerReferences>& sets) {
    std::string out = "{";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out += i ? ",\n" : "\n";
        out += "  " + nlohmann::json(corner_key(sets[i].corner)).dump() + ": " + neighbors_json(sets[i].neighbors, "  ");
    }
    out += sets.empty() ? "}\n" : "\n}\n";
    return out;
}

/// {"target": [p, a], "k": k, "results": [...]}
inline std::string knn_json(const PleasureArousal& target, std::size_t k, const std::vector<Neighbor>& ns) {
    return "{\n  \"target\": [" + format6(target.p) + ", " + format6(target.a) + "],\n  \"k\": " + std::to_string(k) +
           ",\n  \"results\": " + neighbors_json(ns, "  ") + "\n}\n";
}

} // namespace nmface
