#pragma once

// End-to-end compile: annotation text -> validated Timeline -> sampled
// curve -> exported bytes. Shared by the CLI and the HTTP service so both
// produce identical output for identical inputs.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nmface/emotion.hpp"
#include "nmface/error.hpp"
#include "nmface/grid.hpp"
#include "nmface/layering.hpp"
#include "nmface/lexicon.hpp"
#include "nmface/notation.hpp"

namespace nmface {

/// Immutable inputs shared by every compile.
struct CompileContext {
    CornerPoseGrid grid = builtin_grid();
    PoseLexicon lexicon = builtin_lexicon();
    LayerPolicy policy = LayerPolicy::defaults();
};

struct CompileOptions {
    std::optional<int> fps;  // overrides the file's fps hint
    MappingMode mode = MappingMode::continuous;
    CurveFormat format = CurveFormat::json;
    Strictness strictness = Strictness::strict;
};

struct CompileResult {
    bool ok = false;
    std::string output;
    std::vector<Diagnostic> diagnostics;  // warnings, then the error that stopped the compile
    int fps = kDefaultFps;

    const Diagnostic* first_error() const {
        for (const auto& d : diagnostics) {
            if (d.severity == Severity::error) return &d;
        }
        return nullptr;
    }
};

/// fps precedence: explicit option, then the file's hint, then 30.
inline int effective_fps(const Timeline& t, const CompileOptions& opts) {
    if (opts.fps) return *opts.fps;
    if (t.fps_hint) return *t.fps_hint;
    return kDefaultFps;
}

inline CompileResult compile_annotation(std::string_view text, const CompileContext& ctx, const CompileOptions& opts) {
    CompileResult r;
    try {
        if (opts.fps && *opts.fps <= 0) {
            throw Error(ErrorKind::range_error, "fps must be positive, got " + std::to_string(*opts.fps));
        }
        ParseOptions popts;
        popts.lexicon = &ctx.lexicon;
        popts.strictness = opts.strictness;
        Timeline t = parse_annotation(text, popts, &r.diagnostics);
        auto lint = validate_timeline(t);
        r.diagnostics.insert(r.diagnostics.end(), lint.begin(), lint.end());
        if (has_errors(r.diagnostics)) return r;
        r.fps = effective_fps(t, opts);
        SampledCurve curve = sample_timeline(t, ctx.grid, ctx.lexicon, ctx.policy, r.fps,
                                             SampleOptions{opts.mode, opts.strictness}, &r.diagnostics);
        r.output = export_curves(curve, opts.format);
        r.ok = true;
    } catch (const Error& e) {
        r.diagnostics.push_back(to_diagnostic(e));
        r.ok = false;
    }
    return r;
}

} // namespace nmface
