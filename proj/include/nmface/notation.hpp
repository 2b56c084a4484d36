#pragma once

// Line-oriented annotation format.
//
//   # comment
//   duration <sec>                       first directive, required
//   fps <n>                              optional frame-rate hint
//   <track> <start> <end> <payload> [w=<weight>] [attack=<sec>] [release=<sec>]
//
// <track> is gloss, emotion, mouthing or brows. Emotion payload is
// "p=<real> a=<real>"; the others take a single name token (gloss label or
// pose-lexicon name). attack and release default to min(0.1, 10% of the
// timeline duration).
//
// Every number is snapped to the 6-decimal lattice on parse, which is what
// makes parse(serialize(t)) == t exact.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nmface/emotion.hpp"
#include "nmface/error.hpp"
#include "nmface/facs.hpp"
#include "nmface/format.hpp"
#include "nmface/lexicon.hpp"

namespace nmface {

enum class TrackKind : std::uint8_t { gloss, emotion, mouthing, brows };

inline constexpr std::array<TrackKind, 4> kTrackKinds{TrackKind::gloss, TrackKind::emotion,
                                                      TrackKind::mouthing, TrackKind::brows};

constexpr std::string_view track_name(TrackKind k) {
    switch (k) {
    case TrackKind::gloss: return "gloss";
    case TrackKind::emotion: return "emotion";
    case TrackKind::mouthing: return "mouthing";
    case TrackKind::brows: return "brows";
    }
    return "?";
}

inline std::optional<TrackKind> track_from_name(std::string_view s) {
    for (TrackKind k : kTrackKinds) {
        if (track_name(k) == s) return k;
    }
    return std::nullopt;
}

struct Envelope {
    double attack = 0.0;
    double release = 0.0;

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

struct GlossLabel {
    std::string label;
    friend bool operator==(const GlossLabel&, const GlossLabel&) = default;
};

struct PoseName {
    std::string name;
    friend bool operator==(const PoseName&, const PoseName&) = default;
};

/// GlossLabel on gloss tracks, PleasureArousal on emotion tracks, PoseName
/// on mouthing and brows tracks.
using Payload = std::variant<GlossLabel, PleasureArousal, PoseName>;

struct Span {
    double start = 0.0;
    double end = 0.0;
    Payload payload;
    double weight = 1.0;
    Envelope envelope;
    SourceLoc loc;  // diagnostics only; ignored by ==

    double length() const { return end - start; }

    friend bool operator==(const Span& x, const Span& y) {
        return x.start == y.start && x.end == y.end && x.payload == y.payload && x.weight == y.weight &&
               x.envelope == y.envelope;
    }
};

struct Timeline {
    double duration = 0.0;
    std::optional<int> fps_hint;
    std::array<std::vector<Span>, 4> tracks;

    std::vector<Span>& track(TrackKind k) { return tracks[static_cast<std::size_t>(k)]; }
    const std::vector<Span>& track(TrackKind k) const { return tracks[static_cast<std::size_t>(k)]; }

    friend bool operator==(const Timeline&, const Timeline&) = default;
};

constexpr bool payload_matches(TrackKind k, const Payload& p) {
    switch (k) {
    case TrackKind::gloss: return std::holds_alternative<GlossLabel>(p);
    case TrackKind::emotion: return std::holds_alternative<PleasureArousal>(p);
    case TrackKind::mouthing:
    case TrackKind::brows: return std::holds_alternative<PoseName>(p);
    }
    return false;
}

/// Region a pose-lexicon name on this track may touch.
constexpr std::optional<Region> track_region(TrackKind k) {
    if (k == TrackKind::mouthing) return Region::lower;
    if (k == TrackKind::brows) return Region::upper;
    return std::nullopt;
}

inline double default_ramp(double timeline_duration) {
    return quantize6(std::min(0.1, 0.1 * timeline_duration));
}

inline std::string describe_span(TrackKind k, const Span& s) {
    std::string out{track_name(k)};
    out += " span [" + format6(s.start) + ", " + format6(s.end) + "]";
    if (s.loc.line > 0) out += " at line " + std::to_string(s.loc.line);
    return out;
}

/// Sorts every track by start (stable) and rejects overlapping spans on the
/// same track. Touching spans (end == next start) are allowed.
inline void sort_and_check_tracks(Timeline& t) {
    for (TrackKind k : kTrackKinds) {
        auto& spans = t.track(k);
        std::stable_sort(spans.begin(), spans.end(),
                         [](const Span& x, const Span& y) { return x.start < y.start; });
        for (std::size_t i = 1; i < spans.size(); ++i) {
            const Span& prev = spans[i - 1];
            const Span& cur = spans[i];
            if (cur.start < prev.end) {
                const Span& later = cur.loc.line >= prev.loc.line ? cur : prev;
                const Span& earlier = &later == &cur ? prev : cur;
                throw Error(ErrorKind::overlap_error,
                            describe_span(k, later) + " overlaps " + describe_span(k, earlier), later.loc);
            }
        }
    }
}

struct ParseOptions {
    /// When set, mouthing/brow names are resolved (UnknownPose,
    /// RegionMismatch) at parse time.
    const PoseLexicon* lexicon = nullptr;
    /// Lenient clamps out-of-range p/a with a warning instead of RangeError.
    Strictness strictness = Strictness::strict;
};

namespace detail {

struct Token {
    std::string_view text;
    int col = 0;
};

inline std::vector<Token> tokenize_line(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' && line[j] != '#') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

class AnnotationParser {
public:
    AnnotationParser(const ParseOptions& opts, std::vector<Diagnostic>* warnings)
        : opts_(opts), warnings_(warnings) {}

    Timeline parse(std::string_view text) {
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++line_no;
            parse_line(line, line_no);
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        if (!have_duration_) {
            throw Error(ErrorKind::syntax_error, "expected 'duration <seconds>' directive", SourceLoc{1, 1});
        }
        sort_and_check_tracks(timeline_);
        return std::move(timeline_);
    }

private:
    [[noreturn]] void syntax(const std::string& msg, int line, int col) {
        throw Error(ErrorKind::syntax_error, msg, SourceLoc{line, col});
    }

    [[noreturn]] void range(const std::string& msg, int line, int col) {
        throw Error(ErrorKind::range_error, msg, SourceLoc{line, col});
    }

    double number(const Token& tok, std::string_view text, int line, std::string_view what) {
        auto v = parse_real(text);
        if (!v) syntax("expected a number for " + std::string{what} + ", got '" + std::string{text} + "'", line, tok.col);
        return *v;
    }

    void parse_line(std::string_view line, int line_no) {
        auto toks = tokenize_line(line);
        if (toks.empty()) return;
        const Token& head = toks.front();

        if (head.text == "duration") {
            if (have_duration_) syntax("duplicate 'duration' directive", line_no, head.col);
            if (toks.size() != 2) syntax("expected 'duration <seconds>'", line_no, head.col);
            double d = number(toks[1], toks[1].text, line_no, "duration");
            if (d < 0.0) range("duration must be >= 0, got " + std::string{toks[1].text}, line_no, toks[1].col);
            timeline_.duration = quantize6(d);
            have_duration_ = true;
            return;
        }
        if (!have_duration_) {
            syntax("expected 'duration <seconds>' as the first directive, got '" + std::string{head.text} + "'",
                   line_no, head.col);
        }
        if (head.text == "fps") {
            if (timeline_.fps_hint) syntax("duplicate 'fps' directive", line_no, head.col);
            if (toks.size() != 2) syntax("expected 'fps <frames-per-second>'", line_no, head.col);
            auto n = parse_int(toks[1].text);
            if (!n) syntax("expected an integer frame rate, got '" + std::string{toks[1].text} + "'", line_no, toks[1].col);
            if (*n <= 0 || *n > 100000) range("fps must be a positive integer, got " + std::string{toks[1].text}, line_no, toks[1].col);
            timeline_.fps_hint = static_cast<int>(*n);
            return;
        }
        auto kind = track_from_name(head.text);
        if (!kind) {
            syntax("expected one of duration, fps, gloss, emotion, mouthing, brows; got '" +
                       std::string{head.text} + "'",
                   line_no, head.col);
        }
        parse_span(*kind, toks, line_no);
    }

    void parse_span(TrackKind kind, const std::vector<Token>& toks, int line_no) {
        const Token& head = toks.front();
        if (toks.size() < 3) syntax("expected '<track> <start> <end> <payload>'", line_no, head.col);
        Span span;
        span.loc = SourceLoc{line_no, head.col};

        double start = number(toks[1], toks[1].text, line_no, "start");
        double end = number(toks[2], toks[2].text, line_no, "end");
        if (start < 0.0) range("start time must be >= 0, got " + std::string{toks[1].text}, line_no, toks[1].col);
        span.start = quantize6(start);
        span.end = quantize6(end);
        if (!(span.end > span.start)) {
            range("end time " + std::string{toks[2].text} + " must be greater than start " + std::string{toks[1].text},
                  line_no, toks[2].col);
        }

        std::size_t next = 3;
        if (kind != TrackKind::emotion) {
            if (toks.size() < 4) syntax("expected a " + std::string{track_name(kind)} + " name", line_no, head.col);
            const Token& name = toks[3];
            if (name.text.find('=') != std::string_view::npos) {
                syntax("expected a " + std::string{track_name(kind)} + " name before options, got '" +
                           std::string{name.text} + "'",
                       line_no, name.col);
            }
            if (kind == TrackKind::gloss) {
                span.payload = GlossLabel{std::string{name.text}};
            } else {
                if (opts_.lexicon) opts_.lexicon->resolve(name.text, *track_region(kind), SourceLoc{line_no, name.col});
                span.payload = PoseName{std::string{name.text}};
            }
            next = 4;
        }

        std::optional<double> p, a, w, attack, release;
        std::optional<Token> p_tok, a_tok;
        for (std::size_t i = next; i < toks.size(); ++i) {
            const Token& tok = toks[i];
            auto eq = tok.text.find('=');
            if (eq == std::string_view::npos || eq == 0) {
                syntax("expected key=value option, got '" + std::string{tok.text} + "'", line_no, tok.col);
            }
            std::string_view key = tok.text.substr(0, eq);
            std::string_view value = tok.text.substr(eq + 1);
            std::optional<double>* slot = nullptr;
            if (key == "w") slot = &w;
            else if (key == "attack") slot = &attack;
            else if (key == "release") slot = &release;
            else if (kind == TrackKind::emotion && key == "p") { slot = &p; p_tok = tok; }
            else if (kind == TrackKind::emotion && key == "a") { slot = &a; a_tok = tok; }
            else syntax("unknown option '" + std::string{key} + "' on " + std::string{track_name(kind)} + " span", line_no, tok.col);
            if (slot->has_value()) syntax("duplicate option '" + std::string{key} + "'", line_no, tok.col);
            *slot = number(tok, value, line_no, key);
        }

        if (kind == TrackKind::emotion) {
            if (!p) syntax("emotion span needs p=<pleasure>", line_no, head.col);
            if (!a) syntax("emotion span needs a=<arousal>", line_no, head.col);
            span.payload = PleasureArousal{axis(*p, *p_tok, line_no), axis(*a, *a_tok, line_no)};
        }

        const double ramp = default_ramp(timeline_.duration);
        span.weight = w ? quantize6(*w) : 1.0;
        if (!(span.weight > 0.0 && span.weight <= 1.0)) {
            const Token& tok = find_option(toks, "w");
            range("weight must be in (0, 1], got " + std::string{tok.text.substr(2)}, line_no, tok.col);
        }
        span.envelope.attack = attack ? quantize6(*attack) : ramp;
        span.envelope.release = release ? quantize6(*release) : ramp;
        if (attack && *attack < 0.0) {
            const Token& tok = find_option(toks, "attack");
            range("attack must be >= 0", line_no, tok.col);
        }
        if (release && *release < 0.0) {
            const Token& tok = find_option(toks, "release");
            range("release must be >= 0", line_no, tok.col);
        }
        timeline_.track(kind).push_back(std::move(span));
    }

    double axis(double v, const Token& tok, int line_no) {
        if (v >= -1.0 && v <= 1.0) return quantize6(v);
        std::string msg = "'" + std::string{tok.text} + "' is outside [-1, 1]";
        if (opts_.strictness == Strictness::strict) range(msg, line_no, tok.col);
        double clamped = std::clamp(v, -1.0, 1.0);
        if (warnings_) {
            warnings_->push_back({Severity::warning, std::string{kind_name(ErrorKind::out_of_range)},
                                  msg + "; clamped to " + format6(clamped), SourceLoc{line_no, tok.col}});
        }
        return clamped;
    }

    static const Token& find_option(const std::vector<Token>& toks, std::string_view key) {
        for (const auto& t : toks) {
            if (t.text.size() > key.size() && t.text.substr(0, key.size()) == key && t.text[key.size()] == '=') return t;
        }
        return toks.front();
    }

    const ParseOptions& opts_;
    std::vector<Diagnostic>* warnings_;
    Timeline timeline_;
    bool have_duration_ = false;
};

} // namespace detail

/// Throws SyntaxError, RangeError, OverlapError, and (with a lexicon)
/// UnknownPose / RegionMismatch; each carries the line and column of the
/// offending token. Lenient-mode clamping warnings go to `warnings`.
inline Timeline parse_annotation(std::string_view text, const ParseOptions& opts = {},
                                 std::vector<Diagnostic>* warnings = nullptr) {
    return detail::AnnotationParser(opts, warnings).parse(text);
}

/// Canonical text: duration, optional fps, then tracks in gloss, emotion,
/// mouthing, brows order with every option spelled out.
inline std::string serialize_annotation(const Timeline& t) {
    std::string out = "duration " + format6(t.duration) + "\n";
    if (t.fps_hint) out += "fps " + std::to_string(*t.fps_hint) + "\n";
    for (TrackKind k : kTrackKinds) {
        for (const Span& s : t.track(k)) {
            out += std::string{track_name(k)} + ' ' + format6(s.start) + ' ' + format6(s.end) + ' ';
            if (const auto* pa = std::get_if<PleasureArousal>(&s.payload)) {
                out += "p=" + format6(pa->p) + " a=" + format6(pa->a);
            } else if (const auto* g = std::get_if<GlossLabel>(&s.payload)) {
                out += g->label;
            } else {
                out += std::get<PoseName>(s.payload).name;
            }
            out += " w=" + format6(s.weight) + " attack=" + format6(s.envelope.attack) +
                   " release=" + format6(s.envelope.release) + "\n";
        }
    }
    return out;
}

/// Lint pass. Errors: spans ending after the timeline duration. Warnings:
/// envelopes whose apex plateau is empty or unreachable.
inline std::vector<Diagnostic> validate_timeline(const Timeline& t) {
    constexpr double eps = 1e-9;
    std::vector<Diagnostic> out;
    for (TrackKind k : kTrackKinds) {
        for (const Span& s : t.track(k)) {
            std::optional<SourceLoc> loc;
            if (s.loc.line > 0) loc = s.loc;
            if (s.end > t.duration + eps) {
                out.push_back({Severity::error, std::string{kind_name(ErrorKind::range_error)},
                               describe_span(k, s) + " extends past duration " + format6(t.duration), loc});
            }
            if (k == TrackKind::gloss) continue;
            double apex = s.length() - s.envelope.attack - s.envelope.release;
            if (apex < -eps) {
                out.push_back({Severity::warning, "UnreachableApex",
                               describe_span(k, s) + " is shorter than attack + release (" +
                                   format6(s.envelope.attack) + " + " + format6(s.envelope.release) +
                                   "); full weight is never reached",
                               loc});
            } else if (apex <= eps) {
                out.push_back({Severity::warning, "ZeroApex",
                               describe_span(k, s) + " has a zero-length apex (attack + release = span length)",
                               loc});
            }
        }
    }
    return out;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

} // namespace nmface
