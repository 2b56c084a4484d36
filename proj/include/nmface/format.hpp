#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace nmface {

/// Fixed 6-decimal rendering used by every serialized number. Negative zero
/// (and anything that rounds to it) renders as "0.000000".
inline std::string format6(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
    if (ec != std::errc{}) return "nan";
    std::string s(buf, end);
    if (s == "-0.000000") s.erase(0, 1);
    return s;
}

/// Parses a finite real. Accepts an optional leading '+'; rejects trailing
/// characters, nan and inf.
inline std::optional<double> parse_real(std::string_view text) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
        if (!text.empty() && text.front() == '-') return std::nullopt;
    }
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v,
                                     std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

inline std::optional<long long> parse_int(std::string_view text) {
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
        if (!text.empty() && text.front() == '-') return std::nullopt;
    }
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

/// Snaps a value onto the lattice that format6 can represent, so a value
/// survives format6 -> parse_real unchanged.
inline double quantize6(double v) {
    if (!std::isfinite(v)) return v;
    auto q = parse_real(format6(v));
    return q ? *q + 0.0 : v;
}

} // namespace nmface
