// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "nmface/cli.hpp"
#include "support.hpp"

using namespace nmface;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
    std::string detail;
    bool ok = true;

    void fail(const std::string& why) {
        if (ok) detail = why;
        ok = false;
    }
};

bool corner_reproduction(Check& c) {
    std::mt19937_64 rng(101);
    std::vector<CornerPoseGrid> grids;
    for (int i = 0; i < 50; ++i) grids.push_back(test::random_grid(rng));
    auto t0 = Clock::now();
    for (const auto& g : grids) {
        for (Corner k : kCorners) {
            PleasureArousal pa{static_cast<double>(k.p), static_cast<double>(k.a)};
            if (!(pa_to_pose(pa, g, MappingMode::continuous) == g.pose(k))) c.fail("continuous " + corner_label(k));
            if (!(pa_to_pose(pa, g, MappingMode::discrete) == g.pose(k))) c.fail("discrete " + corner_label(k));
        }
    }
    double dt = seconds_since(t0);
    if (dt >= 1.0) c.fail("took " + std::to_string(dt) + " s");
    c.detail = c.ok ? "450 corner lookups x 2 modes exact in " + std::to_string(dt) + " s" : c.detail;
    return c.ok;
}

bool bilinear_soundness(Check& c) {
    std::mt19937_64 rng(102);
    std::uniform_real_distribution<double> axis(-1.0, 1.0);
    double worst_sum = 0.0, worst_edge = 0.0;
    for (int gi = 0; gi < 10; ++gi) {
        auto g = test::random_grid(rng);
        for (int i = 0; i < 1000; ++i) {
            auto pa = test::random_pa(rng);
            auto cell = bilinear_cell(pa);
            auto w = cell.weights();
            worst_sum = std::max(worst_sum, std::abs(w[0] + w[1] + w[2] + w[3] - 1.0));
            auto v = pa_to_pose(pa, g, MappingMode::continuous);
            for (std::size_t u = 0; u < kUnitCount; ++u) {
                double cs[] = {g.pose(cell.p0, cell.a0).at(u), g.pose(cell.p1, cell.a0).at(u),
                               g.pose(cell.p0, cell.a1).at(u), g.pose(cell.p1, cell.a1).at(u)};
                if (v.at(u) < *std::min_element(cs, cs + 4) || v.at(u) > *std::max_element(cs, cs + 4)) {
                    c.fail("hull violated at (" + test::fmt6(pa.p) + "," + test::fmt6(pa.a) + ")");
                }
            }
            // The same edge point evaluated from both neighbouring cells.
            double x = axis(rng);
            BilinearCell right = bilinear_cell({0.0, x}), left = right;
            left.p0 = -1;
            left.p1 = 0;
            left.s = 1.0;
            BilinearCell up = bilinear_cell({x, 0.0}), down = up;
            down.a0 = -1;
            down.a1 = 0;
            down.t = 1.0;
            auto l = bilinear_in_cell(left, g), r = bilinear_in_cell(right, g);
            auto d = bilinear_in_cell(down, g), t = bilinear_in_cell(up, g);
            for (std::size_t u = 0; u < kUnitCount; ++u) {
                worst_edge = std::max({worst_edge, std::abs(l.at(u) - r.at(u)), std::abs(d.at(u) - t.at(u))});
            }
        }
    }
    if (worst_sum > 1e-9) c.fail("weight sum off by " + std::to_string(worst_sum));
    if (worst_edge > 1e-12) c.fail("edge jump " + std::to_string(worst_edge));
    if (c.ok) {
        std::ostringstream s;
        s << "10 grids x 1000 points; max |sum-1| " << worst_sum << ", max edge jump " << worst_edge;
        c.detail = s.str();
    }
    return c.ok;
}

bool discrete_oracle(Check& c) {
    std::mt19937_64 rng(103);
    auto g = test::random_grid(rng);
    int ambiguous = 0;
    for (int i = 0; i < 1000; ++i) {
        auto pa = test::random_pa(rng);
        Corner k = test::nearest_corner_oracle(pa);
        if (k.p == 99) {
            ++ambiguous;
            continue;
        }
        if (!(pa_to_pose(pa, g, MappingMode::discrete) == g.pose(k))) c.fail("mismatch at " + corner_label(k));
    }
    // Exact ties on the rounding boundaries.
    for (double p : {-0.5, 0.5}) {
        for (double a : {-0.5, 0.5, 0.0}) {
            Corner k = test::nearest_corner_oracle({p, a});
            if (!(pa_to_pose({p, a}, g, MappingMode::discrete) == g.pose(k))) c.fail("tie mismatch " + corner_label(k));
        }
    }
    if (ambiguous) c.fail(std::to_string(ambiguous) + " ambiguous oracle results");
    if (c.ok) c.detail = "1000 random points + 6 tie points exact";
    return c.ok;
}

bool corner_reference_procedure(Check& c) {
    std::mt19937_64 rng(104);
    std::uniform_int_distribution<int> step(0, 10);
    std::string csv = "id,pleasure,arousal\n";
    for (int i = 0; i < 500; ++i) {
        // Coarse 0.2 lattice so many rows tie on distance.
        csv += "img" + std::to_string(i) + "," + test::fmt6(-1.0 + 0.2 * step(rng)) + "," +
               test::fmt6(-1.0 + 0.2 * step(rng)) + "\n";
    }
    auto t0 = Clock::now();
    Dataset d = load_dataset(csv, "synthetic");
    auto sets = corner_reference_sets(d, 10);
    double dt = seconds_since(t0);
    if (sets.size() != 9) c.fail("expected 9 lists, got " + std::to_string(sets.size()));
    for (std::size_t i = 0; i < sets.size(); ++i) {
        PleasureArousal t{static_cast<double>(kCorners[i].p), static_cast<double>(kCorners[i].a)};
        if (sets[i].neighbors.size() != 10) c.fail(corner_label(kCorners[i]) + " has wrong size");
        if (sets[i].neighbors != test::knn_oracle(d, t, 10)) c.fail(corner_label(kCorners[i]) + " differs from oracle");
    }
    if (dt >= 1.0) c.fail("took " + std::to_string(dt) + " s");
    if (c.ok) c.detail = "9 x 10 lists match full-sort oracle in " + std::to_string(dt) + " s";
    return c.ok;
}

bool layering_contract(Check& c) {
    auto t = parse_annotation(test::read_file(test::data_path("fixtures/emotion_vs_mouthing.ann")));
    auto g = builtin_grid();
    auto lex = builtin_lexicon();
    auto curve = sample_timeline(t, g, lex, LayerPolicy::defaults(), 30);
    const auto& emo = g.pose(1, 1);
    const auto& pah = lex.find("pah")->vector;
    double worst = 0.0;
    int apex = 0, after = 0;
    for (std::size_t i = 0; i < curve.frames.size(); ++i) {
        double time = curve.time_at(i);
        bool in_apex = time >= 1.2 - 1e-9 && time <= 1.8 + 1e-9;
        bool released = time >= 2.0 - 1e-9 && time <= 2.8 + 1e-9;  // before the emotion's own release
        if (!in_apex && !released) continue;
        (in_apex ? apex : after)++;
        for (std::size_t u = 0; u < kUnitCount; ++u) {
            bool lower = kInventory[u].region == Region::lower;
            double want = in_apex && lower ? pah.at(u) : emo.at(u);
            worst = std::max(worst, std::abs(curve.frames[i].at(u) - want));
        }
    }
    if (worst > 1e-9) c.fail("max deviation " + std::to_string(worst));
    if (apex == 0 || after == 0) c.fail("no frames checked");
    if (c.ok) {
        std::ostringstream s;
        s << apex << " apex frames, " << after << " post-release frames; max deviation " << worst;
        c.detail = s.str();
    }
    return c.ok;
}

bool envelope_support(Check& c) {
    std::mt19937_64 rng(105);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst_mid = 0.0;
    for (int i = 0; i < 1000; ++i) {
        Span s;
        s.start = u01(rng) * 5;
        s.end = s.start + 0.01 + u01(rng) * 3;
        double len = s.end - s.start;
        s.envelope = {u01(rng) * len * 0.5, u01(rng) * len * 0.5};
        if (i % 10 == 0) s.envelope.attack = 0;
        if (i % 10 == 1) s.envelope.release = 0;
        s.weight = 0.01 + 0.99 * u01(rng);
        const double plateau0 = s.start + s.envelope.attack, plateau1 = s.end - s.envelope.release;

        for (double t : {s.start, s.end, s.start - u01(rng), s.end + u01(rng), s.start - 1e-9, s.end + 1e-9}) {
            if (envelope_eval(s, t) != 0.0) c.fail("nonzero outside support at span " + std::to_string(i));
        }
        for (int j = 0; j < 5; ++j) {
            double t = plateau0 + (plateau1 - plateau0) * u01(rng);
            if (t <= s.start || t >= s.end) continue;
            if (envelope_eval(s, t) != s.weight) c.fail("plateau != weight at span " + std::to_string(i));
        }
        // Midpoint linearity within each ramp.
        auto check_mid = [&](double x0, double x1) {
            if (x1 - x0 < 1e-9) return;
            double a = x0 + (x1 - x0) * u01(rng), b = x0 + (x1 - x0) * u01(rng);
            if (a == b) return;
            // Interpolate at the midpoint as actually rounded: on steep ramps
            // one ulp of time is worth more than 1e-12 of weight.
            double m = 0.5 * (a + b);
            double lambda = (m - a) / (b - a);
            double fa = envelope_eval(s, a), fb = envelope_eval(s, b);
            double err = std::abs(envelope_eval(s, m) - (fa + lambda * (fb - fa)));
            worst_mid = std::max(worst_mid, err);
            if (err > 1e-12) c.fail("ramp not linear at span " + std::to_string(i));
        };
        check_mid(s.start + 1e-12, plateau0);
        check_mid(plateau1, s.end - 1e-12);
    }
    if (c.ok) {
        std::ostringstream d;
        d << "1000 spans: zero outside, plateau = weight, max midpoint error " << worst_mid;
        c.detail = d.str();
    }
    return c.ok;
}

std::pair<int, std::string> run_binary(const std::string& cmd) {
    std::string out;
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return {-1, {}};
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int status = ::pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

bool determinism_and_round_trips(Check& c) {
    for (const auto& f : test::corpus_files()) {
        std::string cmd = std::string{NMFACE_CLI_PATH} + " compile '" + test::data_path(f) + "' 2>&1";
        auto first = run_binary(cmd), second = run_binary(cmd);
        if (first.first != 0) c.fail(f + " exited " + std::to_string(first.first));
        if (first.second != second.second || first.second.empty()) c.fail(f + " output differs between runs");

        auto t = parse_annotation(test::read_file(test::data_path(f)));
        auto text = serialize_annotation(t);
        if (!(parse_annotation(text) == t) || serialize_annotation(parse_annotation(text)) != text) {
            c.fail(f + " parse/serialize is not a fixpoint");
        }
    }
    std::mt19937_64 rng(106);
    for (int i = 0; i < 100; ++i) {
        auto g = test::random_grid(rng);
        auto json = grid_save(g);
        if (!(grid_load(json) == g) || grid_save(grid_load(json)) != json) c.fail("grid round-trip inexact");
    }
    auto builtin = grid_save(builtin_grid());
    if (grid_save(grid_load(builtin)) != builtin) c.fail("built-in grid round-trip inexact");
    if (c.ok) c.detail = "5 corpus files byte-identical across runs; annotation and grid round-trips exact";
    return c.ok;
}

bool range_safety(Check& c) {
    std::mt19937_64 rng(107);
    auto dir = fs::temp_directory_path() / ("nmface_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::size_t values = 0;
    for (int i = 0; i < 1000 && c.ok; ++i) {
        auto path = (dir / "case.ann").string();
        cli::write_text_file(path, test::random_annotation(rng));
        std::vector<std::string> args = {"compile", path, "-f", "csv"};
        if (i % 2) args.insert(args.end(), {"--mode", "discrete"});
        std::ostringstream out, err;
        int code = cli::run(args, out, err);
        if (code != 0) {
            c.fail("case " + std::to_string(i) + " exited " + std::to_string(code) + ": " + err.str());
            break;
        }
        std::istringstream lines(out.str());
        std::string line;
        std::getline(lines, line);
        while (std::getline(lines, line)) {
            std::istringstream cells(line);
            std::string cell;
            std::getline(cells, cell, ',');  // time
            while (std::getline(cells, cell, ',')) {
                auto v = parse_real(cell);
                ++values;
                if (!v || *v < 0.0 || *v > 1.0) c.fail("case " + std::to_string(i) + " value " + cell);
            }
        }
    }
    fs::remove_all(dir);
    if (c.ok) c.detail = "1000 timelines exit 0; " + std::to_string(values) + " values in [0,1]";
    return c.ok;
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<bool(Check&)>>> criteria = {
        {"corner reproduction", corner_reproduction},
        {"bilinear soundness", bilinear_soundness},
        {"discrete-mode oracle", discrete_oracle},
        {"corner reference sets", corner_reference_procedure},
        {"layering contract", layering_contract},
        {"envelope support", envelope_support},
        {"determinism and round-trips", determinism_and_round_trips},
        {"range safety fuzz", range_safety},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        bool ok = false;
        try {
            ok = fn(c);
        } catch (const std::exception& e) {
            c.detail = std::string{"exception: "} + e.what();
        }
        std::cout << (ok ? "PASS: " : "FAIL: ") << name << " (" << c.detail << ")\n";
        failures += ok ? 0 : 1;
    }
    std::cout << criteria.size() - static_cast<std::size_t>(failures) << "/" << criteria.size() << " criteria passed\n";
    return failures ? 1 : 0;
}
