#pragma once

// `nmface` command line: compile, grid, pick, serve.
//
// Exit codes: 0 success, 1 user or data error, 2 internal error.
// Diagnostics go to the error stream as "severity: file:line:col: message",
// or one JSON object per line with --json-diagnostics.

#include <cstddef>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nmface/compile.hpp"
#include "nmface/error.hpp"
#include "nmface/format.hpp"
#include "nmface/grid.hpp"
#include "nmface/reference_picker.hpp"
#include "nmface/server.hpp"
#include "nmface/service.hpp"

namespace nmface::cli {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io_error, "cannot write '" + path + "'");
    out << text;
    if (!out) throw Error(ErrorKind::io_error, "failed writing '" + path + "'");
}

struct CompileConfig {
    std::string input;
    std::string grid;     // empty: built-in grid
    std::string lexicon;  // empty: built-in lexicon
    std::string policy;   // empty: default policy
    std::optional<int> fps;
    MappingMode mode = MappingMode::continuous;
    std::string output;   // empty or "-": stdout
    CurveFormat format = CurveFormat::json;
    Strictness strictness = Strictness::strict;
    bool json_diagnostics = false;
};

class DiagnosticSink {
public:
    DiagnosticSink(std::ostream& err, bool json) : err_(err), json_(json) {}

    void emit(const Diagnostic& d, const std::string& file) {
        if (!json_) {
            err_ << format_diagnostic(d, file) << '\n';
            return;
        }
        nlohmann::ordered_json j;
        j["severity"] = std::string{severity_name(d.severity)};
        j["file"] = file;
        j["line"] = d.loc ? nlohmann::ordered_json(d.loc->line) : nlohmann::ordered_json(nullptr);
        j["col"] = d.loc ? nlohmann::ordered_json(d.loc->col) : nlohmann::ordered_json(nullptr);
        j["kind"] = d.kind;
        j["message"] = d.message;
        err_ << j.dump() << '\n';
    }

    void emit(const Error& e, const std::string& file) {
        Diagnostic d = to_diagnostic(e);
        if (!e.path().empty() && !d.loc) d.message += " [at " + e.path() + "]";
        emit(d, file);
    }

private:
    std::ostream& err_;
    bool json_;
};

/// Loads one optional input file, reporting failures against that file.
template <typename T, typename Loader>
std::optional<T> load_input(const std::string& path, Loader load, T fallback, DiagnosticSink& sink) {
    if (path.empty()) return fallback;
    try {
        return load(read_text_file(path));
    } catch (const Error& e) {
        sink.emit(e, path);
        return std::nullopt;
    }
}

inline std::optional<CompileContext> load_context(const std::string& grid, const std::string& lexicon,
                                                  const std::string& policy, DiagnosticSink& sink) {
    CompileContext ctx;
    auto g = load_input<CornerPoseGrid>(grid, grid_load, builtin_grid(), sink);
    auto l = load_input<PoseLexicon>(lexicon, lexicon_load, builtin_lexicon(), sink);
    auto p = load_input<LayerPolicy>(policy, policy_load, LayerPolicy::defaults(), sink);
    if (!g || !l || !p) return std::nullopt;
    ctx.grid = std::move(*g);
    ctx.lexicon = std::move(*l);
    ctx.policy = std::move(*p);
    return ctx;
}

inline int cmd_compile(const CompileConfig& cfg, std::ostream& out, std::ostream& err) {
    DiagnosticSink sink(err, cfg.json_diagnostics);
    auto ctx = load_context(cfg.grid, cfg.lexicon, cfg.policy, sink);
    if (!ctx) return 1;
    std::string text;
    try {
        text = read_text_file(cfg.input);
    } catch (const Error& e) {
        sink.emit(e, cfg.input);
        return 1;
    }
    CompileResult r = compile_annotation(text, *ctx, {cfg.fps, cfg.mode, cfg.format, cfg.strictness});
    for (const auto& d : r.diagnostics) sink.emit(d, cfg.input);
    if (!r.ok) return 1;
    if (cfg.output.empty() || cfg.output == "-") {
        out << r.output;
        return 0;
    }
    try {
        write_text_file(cfg.output, r.output);
    } catch (const Error& e) {
        sink.emit(e, cfg.output);
        return 1;
    }
    return 0;
}

/// Text analogue of the 3x3 expression grid: rows are arousal +1, 0, -1,
/// columns pleasure -1, 0, +1; each cell lists its nonzero units.
inline std::string grid_table(const CornerPoseGrid& g) {
    auto cell = [](const ActivationVector& v) {
        if (v.is_neutral()) return std::string{"neutral"};
        std::string s;
        for (std::size_t i = 0; i < kUnitCount; ++i) {
            if (v.at(i) == 0.0) continue;
            if (!s.empty()) s += ' ';
            s += std::string{kInventory[i].name} + '=' + format6(v.at(i));
        }
        return s;
    };
    auto signed_label = [](int x) { return x > 0 ? std::string{"+1"} : std::to_string(x); };
    std::string out = "grid " + nlohmann::json(g.name()).dump() + " version " + std::to_string(g.version()) + "\n";
    out += "a \\ p | -1 | 0 | +1\n";
    for (int a = 1; a >= -1; --a) {
        out += signed_label(a);
        for (int p = -1; p <= 1; ++p) out += " | " + cell(g.pose(p, a));
        out += '\n';
    }
    return out;
}

inline std::string corner_lines() {
    std::string out;
    for (Corner c : kCorners) out += "(" + std::to_string(c.p) + ", " + std::to_string(c.a) + ")\n";
    return out;
}

inline int cmd_grid(const std::string& action, const std::string& grid_path, std::ostream& out, std::ostream& err) {
    if (action == "corners") {
        out << corner_lines();
        return 0;
    }
    DiagnosticSink sink(err, false);
    auto g = load_input<CornerPoseGrid>(grid_path, grid_load, builtin_grid(), sink);
    if (!g) return 1;
    out << grid_table(*g);
    return 0;
}

inline std::optional<PleasureArousal> parse_target(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) return std::nullopt;
    auto p = parse_real(detail::trim(std::string_view{s}.substr(0, comma)));
    auto a = parse_real(detail::trim(std::string_view{s}.substr(comma + 1)));
    if (!p || !a) return std::nullopt;
    return PleasureArousal{*p, *a};
}

inline int cmd_pick(const std::string& dataset_path, std::size_t k, const std::optional<std::string>& target,
                    bool corners, std::ostream& out, std::ostream& err) {
    DiagnosticSink sink(err, false);
    try {
        if (corners == target.has_value()) {
            throw Error(ErrorKind::bad_request, "give exactly one of --target p,a or --corners");
        }
        if (k == 0) throw Error(ErrorKind::range_error, "k must be >= 1");
        Dataset d = load_dataset(read_text_file(dataset_path), dataset_path);
        if (corners) {
            auto sets = corner_reference_sets(d, k);
            std::size_t total = 0;
            std::set<std::string> unique;
            for (const auto& s : sets) {
                total += s.neighbors.size();
                for (const auto& n : s.neighbors) unique.insert(n.id);
            }
            out << corner_sets_json(sets);
            err << "note: " << total << " references across " << sets.size() << " corners, " << unique.size()
                << " unique samples\n";
            return 0;
        }
        auto pa = parse_target(*target);
        if (!pa) throw Error(ErrorKind::bad_request, "--target expects 'p,a', got '" + *target + "'");
        PleasureArousal checked = checked_pa(*pa, Strictness::strict);
        out << knn_json(checked, k, knn_pick(d, checked, k));
        return 0;
    } catch (const Error& e) {
        sink.emit(e, dataset_path);
        return 1;
    }
}

inline int cmd_serve(const std::string& host, int port, const std::string& grid, const std::string& lexicon,
                     const std::string& policy, std::ostream& err) {
    DiagnosticSink sink(err, false);
    auto ctx = load_context(grid, lexicon, policy, sink);
    if (!ctx) return 1;
    PreviewService svc(std::move(*ctx));
    return run_server(svc, host, port, err);
}

/// Entry point; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile pleasure/arousal sign-language annotations into facial control curves", "nmface"};
    app.require_subcommand(1);

    CompileConfig cc;
    std::string mode_text = "continuous";
    std::string format_text = "json";
    bool lenient = false;
    int fps = 0;
    auto* compile = app.add_subcommand("compile", "Compile an annotation file into sampled curves");
    compile->add_option("input", cc.input, "Annotation file")->required();
    compile->add_option("-g,--grid", cc.grid, "Corner pose grid JSON (default: built-in)");
    compile->add_option("-l,--lexicon", cc.lexicon, "Pose lexicon JSON (default: built-in)");
    compile->add_option("-p,--policy", cc.policy, "Layer policy JSON (default: emotion < brows < mouthing)");
    auto* fps_opt = compile->add_option("--fps", fps, "Sample rate; overrides the file's fps")
                        ->check(CLI::Range(1, 100000));
    compile->add_option("-m,--mode", mode_text, "Pose mapping")->check(CLI::IsMember({"discrete", "continuous"}));
    compile->add_option("-o,--output", cc.output, "Output file (default: stdout)");
    compile->add_option("-f,--format", format_text, "Output format")->check(CLI::IsMember({"json", "csv"}));
    compile->add_flag("--lenient", lenient, "Clamp out-of-range p/a with a warning instead of failing");
    compile->add_flag("--json-diagnostics", cc.json_diagnostics, "Emit diagnostics as JSON lines");

    std::string grid_action;
    std::string grid_path;
    auto* grid = app.add_subcommand("grid", "Inspect a corner pose grid");
    grid->add_option("action", grid_action, "show | corners")->required()->check(CLI::IsMember({"show", "corners"}));
    grid->add_option("grid", grid_path, "Grid JSON (default: built-in)");

    std::string dataset_path;
    std::size_t k = 10;
    std::string target_text;
    bool corners = false;
    auto* pick = app.add_subcommand("pick", "Nearest annotated references by pleasure/arousal");
    pick->add_option("dataset", dataset_path, "CSV with columns id,pleasure,arousal")->required();
    pick->add_option("-k", k, "Neighbours per query")->check(CLI::PositiveNumber);
    auto* target_opt = pick->add_option("--target", target_text, "Query point 'p,a'");
    pick->add_flag("--corners", corners, "Query all nine corner targets");

    std::string host = "127.0.0.1";
    int port = 8080;
    std::string serve_grid, serve_lexicon, serve_policy;
    auto* serve = app.add_subcommand("serve", "Serve the preview HTTP API");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    serve->add_option("-g,--grid", serve_grid, "Corner pose grid JSON (default: built-in)");
    serve->add_option("-l,--lexicon", serve_lexicon, "Pose lexicon JSON (default: built-in)");
    serve->add_option("-p,--policy", serve_policy, "Layer policy JSON");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.emplace_back("nmface");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*compile) {
            cc.mode = *mode_from_name(mode_text);
            cc.format = *curve_format_from_name(format_text);
            cc.strictness = lenient ? Strictness::lenient : Strictness::strict;
            if (*fps_opt) cc.fps = fps;
            return cmd_compile(cc, out, err);
        }
        if (*grid) return cmd_grid(grid_action, grid_path, out, err);
        if (*pick) {
            std::optional<std::string> target;
            if (*target_opt) target = target_text;
            return cmd_pick(dataset_path, k, target, corners, out, err);
        }
        if (*serve) return cmd_serve(host, port, serve_grid, serve_lexicon, serve_policy, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace nmface::cli
