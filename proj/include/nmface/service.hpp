#pragma once

// Request handlers for the preview API, independent of any socket library.
//
//   GET  /health                      {"ok":true}
//   GET  /grid                        grid JSON
//   GET  /pose?p=&a=&mode=&lenient=   {"units":[...],"values":[...]}
//   POST /compile?fps=&mode=&format=&lenient=   curve JSON or CSV
//
// Errors are {"error": {"kind", "message", "line", "col"}} with status 400.
// Handlers only read the shared CompileContext.

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "nmface/compile.hpp"
#include "nmface/emotion.hpp"
#include "nmface/error.hpp"
#include "nmface/format.hpp"
#include "nmface/grid.hpp"

namespace nmface {

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

inline std::string error_json(const Diagnostic& d) {
    nlohmann::json line = d.loc ? nlohmann::json(d.loc->line) : nlohmann::json(nullptr);
    nlohmann::json col = d.loc ? nlohmann::json(d.loc->col) : nlohmann::json(nullptr);
    return "{\"error\": {\"kind\": " + nlohmann::json(d.kind).dump() + ", \"message\": " +
           nlohmann::json(d.message).dump() + ", \"line\": " + line.dump() + ", \"col\": " + col.dump() + "}}\n";
}

inline std::string pose_json(const ActivationVector& v) {
    return "{\"units\": " + detail::unit_list_json() + ", \"values\": " + detail::values_json(v.values()) + "}\n";
}

class PreviewService {
public:
    explicit PreviewService(CompileContext ctx) : ctx_(std::move(ctx)) {}

    const CompileContext& context() const noexcept { return ctx_; }

    HttpResponse health() const { return {200, "application/json", "{\"ok\":true}\n"}; }

    HttpResponse grid() const { return {200, "application/json", grid_save(ctx_.grid)}; }

    HttpResponse pose(const QueryParams& q) const {
        try {
            PleasureArousal pa{require_real(q, "p"), require_real(q, "a")};
            MappingMode mode = mode_param(q);
            ActivationVector v = pa_to_pose(pa, ctx_.grid, mode, strictness_param(q));
            return {200, "application/json", pose_json(v)};
        } catch (const Error& e) {
            return bad_request(to_diagnostic(e));
        }
    }

    HttpResponse compile(std::string_view body, const QueryParams& q) const {
        CompileOptions opts;
        try {
            opts.mode = mode_param(q);
            opts.strictness = strictness_param(q);
            if (auto it = q.find("fps"); it != q.end()) {
                auto n = parse_int(it->second);
                if (!n || *n <= 0 || *n > 100000) bad("fps must be a positive integer, got '" + it->second + "'");
                opts.fps = static_cast<int>(*n);
            }
            if (auto it = q.find("format"); it != q.end()) {
                auto f = curve_format_from_name(it->second);
                if (!f) bad("format must be json or csv, got '" + it->second + "'");
                opts.format = *f;
            }
        } catch (const Error& e) {
            return bad_request(to_diagnostic(e));
        }
        CompileResult r = compile_annotation(body, ctx_, opts);
        if (!r.ok) return bad_request(*r.first_error());
        return {200, opts.format == CurveFormat::csv ? "text/csv" : "application/json", std::move(r.output)};
    }

private:
    static HttpResponse bad_request(const Diagnostic& d) { return {400, "application/json", error_json(d)}; }

    [[noreturn]] static void bad(const std::string& msg) { throw Error(ErrorKind::bad_request, msg); }

    static double require_real(const QueryParams& q, const std::string& key) {
        auto it = q.find(key);
        if (it == q.end()) bad("missing query parameter '" + key + "'");
        auto v = parse_real(it->second);
        if (!v) bad("query parameter '" + key + "' is not a number: '" + it->second + "'");
        return *v;
    }

    static MappingMode mode_param(const QueryParams& q) {
        auto it = q.find("mode");
        if (it == q.end() || it->second.empty()) return MappingMode::continuous;
        auto m = mode_from_name(it->second);
        if (!m) bad("mode must be discrete or continuous, got '" + it->second + "'");
        return *m;
    }

    static Strictness strictness_param(const QueryParams& q) {
        auto it = q.find("lenient");
        if (it == q.end() || it->second == "0" || it->second == "false" || it->second.empty()) return Strictness::strict;
        if (it->second == "1" || it->second == "true") return Strictness::lenient;
        bad("lenient must be 0/1 or true/false, got '" + it->second + "'");
    }

    CompileContext ctx_;
};

} // namespace nmface
