#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace nmface {

/// 1-based position inside an annotation or data file.
struct SourceLoc {
    int line = 0;
    int col = 0;

    friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

enum class ErrorKind {
    malformed_grid,
    invariant_violation,
    missing_unit,
    unknown_unit,
    out_of_range,
    syntax_error,
    overlap_error,
    range_error,
    unknown_pose,
    region_mismatch,
    malformed_lexicon,
    malformed_policy,
    malformed_row,
    duplicate_id,
    empty_dataset,
    unknown_track_kind,
    bad_request,
    io_error,
};

constexpr std::string_view kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::malformed_grid: return "MalformedGrid";
    case ErrorKind::invariant_violation: return "InvariantViolation";
    case ErrorKind::missing_unit: return "MissingUnit";
    case ErrorKind::unknown_unit: return "UnknownUnit";
    case ErrorKind::out_of_range: return "OutOfRange";
    case ErrorKind::syntax_error: return "SyntaxError";
    case ErrorKind::overlap_error: return "OverlapError";
    case ErrorKind::range_error: return "RangeError";
    case ErrorKind::unknown_pose: return "UnknownPose";
    case ErrorKind::region_mismatch: return "RegionMismatch";
    case ErrorKind::malformed_lexicon: return "MalformedLexicon";
    case ErrorKind::malformed_policy: return "MalformedPolicy";
    case ErrorKind::malformed_row: return "MalformedRow";
    case ErrorKind::duplicate_id: return "DuplicateId";
    case ErrorKind::empty_dataset: return "EmptyDataset";
    case ErrorKind::unknown_track_kind: return "UnknownTrackKind";
    case ErrorKind::bad_request: return "BadRequest";
    case ErrorKind::io_error: return "IoError";
    }
    return "Unknown";
}

/// Every user/data error raised by the library. `path` names the offending
/// element of a structured input (e.g. "poses.1,-1"); `loc` is set for
/// errors inside line-oriented text.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<SourceLoc> loc = std::nullopt,
          std::string path = {})
        : std::runtime_error(message), kind_(kind), loc_(loc), path_(std::move(path)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::optional<SourceLoc>& loc() const noexcept { return loc_; }
    const std::string& path() const noexcept { return path_; }

private:
    ErrorKind kind_;
    std::optional<SourceLoc> loc_;
    std::string path_;
};

enum class Severity { warning, error };

constexpr std::string_view severity_name(Severity s) {
    return s == Severity::warning ? "warning" : "error";
}

struct Diagnostic {
    Severity severity = Severity::warning;
    std::string kind;
    std::string message;
    std::optional<SourceLoc> loc;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// "severity: file:line:col: message"
inline std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
    std::string out{severity_name(d.severity)};
    out += ": ";
    out += file;
    if (d.loc) {
        out += ':' + std::to_string(d.loc->line) + ':' + std::to_string(d.loc->col);
    }
    out += ": ";
    out += d.message;
    return out;
}

inline Diagnostic to_diagnostic(const Error& e) {
    return Diagnostic{Severity::error, std::string{kind_name(e.kind())}, e.what(), e.loc()};
}

} // namespace nmface
