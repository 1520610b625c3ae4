#include <cmath>
#include <numbers>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smock/convergence.hpp"
#include "smock/metric.hpp"
#include "smock/norm.hpp"
#include "smock/pattern.hpp"
#include "smock/raster.hpp"

using namespace smock;

namespace {

constexpr int kExitBadPattern = 2;
constexpr int kExitBadCoords = 3;

struct BadCoords : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadPattern : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Vec2 parse_vec2(const std::string& s) {
    double x, y;
    char tail;
    if (std::sscanf(s.c_str(), "%lf,%lf%c", &x, &y, &tail) != 2 || !std::isfinite(x) ||
        !std::isfinite(y))
        throw BadCoords("bad coordinate pair '" + s + "' (want x,y)");
    return {x, y};
}

void check_grid(int grid) {
    if (grid < 16 || grid > 4096 || (grid & (grid - 1)))
        throw CLI::ValidationError("--grid must be a power of two in [16, 4096]");
}

PatternSpec load_or_die(const std::string& path) {
    try {
        return load_pattern_file(path);
    } catch (const std::exception& e) {
        throw BadPattern(e.what());
    }
}

// Window for whole-pattern sweeps: one periodic cell block, or the
// generator hull padded by 1 for finite patterns.
AxisBox default_window(const PatternSpec& spec) {
    if (spec.periodic()) return {{0, 0}, {4, 4}};
    AxisBox b = spec.generators.front().bounds();
    for (const Stitch& s : spec.generators) {
        AxisBox sb = s.bounds();
        b.min.x = std::fmin(b.min.x, sb.min.x);
        b.min.y = std::fmin(b.min.y, sb.min.y);
        b.max.x = std::fmax(b.max.x, sb.max.x);
        b.max.y = std::fmax(b.max.y, sb.max.y);
    }
    b = {{b.min.x - 1, b.min.y - 1}, {b.max.x + 1, b.max.y + 1}};
    const double side = std::fmax(b.width(), b.height());
    return {b.min, {b.min.x + side, b.min.y + side}};
}

NormSpec pick_norm(const PatternSpec& spec, const std::string& which, double rfit, int ndirs) {
    if (which == "euclidean") return NormSpec::euclidean();
    return fit_norm(spec, rfit, ndirs);
}

int cmd_dist(const std::string& pattern, const std::string& from, const std::string& to) {
    PatternSpec spec = load_or_die(pattern);
    Vec2 v = parse_vec2(from), w = parse_vec2(to);
    auto [d, wit] = smocked_distance(spec, v, w);
    std::printf("%.12f\n", d);
    for (std::size_t i = 0; i < wit.hops.size(); ++i) {
        const Hop& h = wit.hops[i];
        std::printf("hop %s (%.6f,%.6f)->(%.6f,%.6f)", h.stitch.c_str(), h.entry.x, h.entry.y,
                    h.exit.x, h.exit.y);
        if (i + 1 < wit.hops.size()) std::printf(" len %.12f", wit.segment_lengths[i]);
        std::printf("\n");
    }
    return 0;
}

int cmd_invariants(const std::string& pattern) {
    PatternSpec spec = load_or_die(pattern);
    std::optional<AxisBox> finite_window;
    if (!spec.periodic()) finite_window = default_window(spec);
    PatternInvariants inv = pattern_invariants(spec, 1e-3, finite_window);
    std::printf("separation %.12f\n", inv.separation);
    std::printf("depth [%.12f, %.12f]\n", inv.depth.lo, inv.depth.hi);
    std::printf("length_min %.12f\nlength_max %.12f\n", inv.length_min, inv.length_max);
    std::printf("cover_radius_ok %d\n", inv.cover_radius_ok ? 1 : 0);
    NicenessReport nice =
        niceness_report(spec, default_window(spec), {0.2, 0.1, 0.05, 0.01, 0.005}, 0.2, 512);
    for (std::size_t i = 0; i < nice.eps.size(); ++i)
        std::printf("tube eps %.3f vol [%.6f, %.6f]\n", nice.eps[i], nice.volumes[i].lo,
                    nice.volumes[i].hi);
    const char* verdict = nice.verdict == NicenessVerdict::Nice        ? "NICE"
                          : nice.verdict == NicenessVerdict::NotNice   ? "NOT_NICE"
                                                                      : "INCONCLUSIVE";
    std::printf("niceness %s\n", verdict);
    return 0;
}

int cmd_ball(const std::string& pattern, const std::string& center, double r, int grid,
             const std::string& out) {
    PatternSpec spec = load_or_die(pattern);
    Vec2 x0 = parse_vec2(center);
    check_grid(grid);
    if (!(r > 0)) throw BadCoords("--radius must be positive");
    // Window from the certified lower bound: U_r lies inside
    // {p : lb(x0, p) <= r}, probed along 64 rays and padded.
    Smocked sm(spec);
    double reach = r;
    for (int k = 0; k < 64; ++k) {
        Vec2 u{std::cos(2 * std::numbers::pi * k / 64), std::sin(2 * std::numbers::pi * k / 64)};
        double lo = r, hi = 64 * r + 8;
        if (sm.lower_bound(x0, x0 + u * hi) <= r) {
            lo = hi;
        } else {
            for (int it = 0; it < 60; ++it) {
                double mid = 0.5 * (lo + hi);
                (sm.lower_bound(x0, x0 + u * mid) <= r ? lo : hi) = mid;
            }
        }
        reach = std::fmax(reach, lo);
    }
    const double half = reach + 1.0;
    BallRaster ras =
        rasterize_rho(spec, x0, {{x0.x - half, x0.y - half}, {x0.x + half, x0.y + half}}, grid);
    VolumeBracket vb = ball_volume(ras, r);
    std::printf("volume [%.9g, %.9g]\n", vb.lo, vb.hi);
    if (vb.edge_warning) std::printf("warning: boundary cells touch the window edge\n");
    PerimeterEstimate pe = perimeter_bracket(ras, r);
    std::printf("perimeter [%.9g, %.9g]\n", pe.lo, pe.hi);
    if (!out.empty()) {
        svg_export(ras, spec, r, out + ".svg");
        raster_csv(ras, out + ".csv");
    }
    return 0;
}

int cmd_tube(const std::string& pattern, double eps, int grid) {
    PatternSpec spec = load_or_die(pattern);
    check_grid(grid);
    VolumeBracket vb = tube_raster_volume(spec, eps, default_window(spec), grid);
    std::printf("tube volume [%.9g, %.9g]\n", vb.lo, vb.hi);
    return 0;
}

int cmd_tangent(const std::string& pattern, double r, const std::vector<double>& scales, int grid,
                int samples, std::uint64_t seed, const std::string& out, const std::string& norm,
                const std::string& ksource, double rfit, int ndirs) {
    PatternSpec spec = load_or_die(pattern);
    check_grid(grid);
    NormSpec F = pick_norm(spec, norm, rfit, ndirs);
    KSource ks = ksource == "sampled" ? KSource::Sampled : KSource::Lemma221;
    ConvergenceReport rep = convergence_table(spec, F, r, scales, grid, samples, seed, ks);
    std::string csv = convergence_csv(rep);
    if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << csv;
    }
    if (rep.rows.size() > 1) {
        if (rep.monotone_gh) std::printf("MONOTONE_GH\n");
        if (rep.monotone_swif) std::printf("MONOTONE_SWIF\n");
    }
    return 0;
}

int cmd_normfit(const std::string& pattern, double R, int ndirs, const std::string& out) {
    PatternSpec spec = load_or_die(pattern);
    NormSpec F = fit_norm(spec, R, ndirs);
    std::string json = "{\n  \"vertices\": [\n";
    char buf[96];
    for (std::size_t i = 0; i < F.vertices.size(); ++i) {
        std::snprintf(buf, sizeof buf, "    [%.12g, %.12g]%s\n", F.vertices[i].x, F.vertices[i].y,
                      i + 1 < F.vertices.size() ? "," : "");
        json += buf;
    }
    json += "  ]\n}\n";
    if (out.empty()) {
        std::fputs(json.c_str(), stdout);
    } else {
        std::ofstream f(out);
        if (!f) throw std::runtime_error("cannot write " + out);
        f << json;
    }
    NormStats st = norm_stats(F);
    std::fprintf(stderr, "fitted gauge: %zu vertices, dil %.9g, lambda %.9g\n", F.vertices.size(),
                 st.dil, st.lambda);
    return 0;
}

int cmd_kbound(const std::string& pattern, int samples, std::uint64_t seed,
               const std::string& norm, double rfit, int ndirs) {
    PatternSpec spec = load_or_die(pattern);
    NormSpec F = pick_norm(spec, norm, rfit, ndirs);
    KReport kr = k_report(spec, F, {{-20, -20}, {20, 20}}, samples, seed);
    std::printf("K_hat %.9g (witness (%.6f,%.6f)-(%.6f,%.6f), %d samples, seed %llu)\n",
                kr.sampled.value, kr.sampled.witness_a.x, kr.sampled.witness_a.y,
                kr.sampled.witness_b.x, kr.sampled.witness_b.y, kr.sampled.samples,
                static_cast<unsigned long long>(kr.sampled.seed));
    std::printf("h_hi %.9g\nC %.9g\ndil %.9g\nL %.9g\n", kr.h_hi, kr.C, kr.dil, kr.L);
    std::printf("K_lemma221 %.9g\n", kr.lemma_bound);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "smocklab: smocked metric space computations.\n"
        "Exit codes: 0 success, 2 malformed pattern file, 3 bad coordinates."};
    app.require_subcommand(1);

    std::string pattern, from, to, out, norm = "fitted", ksource = "lemma";
    std::string center;
    double radius = 1.0, rfit = 1000.0;
    std::vector<double> scales{10, 100, 1000};
    int grid = 256, samples = 2000, ndirs = 64;
    std::uint64_t seed = 42;

    auto add_pattern = [&](CLI::App* c) {
        c->add_option("--pattern", pattern, "pattern JSON file")->required();
    };

    CLI::App* dist = app.add_subcommand("dist", "smocked distance with witness");
    add_pattern(dist);
    dist->add_option("--from", from, "source point x,y")->required();
    dist->add_option("--to", to, "target point x,y")->required();

    CLI::App* inv = app.add_subcommand("invariants", "separation, depth, lengths, niceness");
    add_pattern(inv);

    CLI::App* ball = app.add_subcommand("ball", "ball pre-image raster, volume, SVG/CSV export");
    add_pattern(ball);
    ball->add_option("--from", center, "ball center x,y")->required();
    ball->add_option("--radius", radius, "ball radius");
    ball->add_option("--grid", grid, "cells per side (power of two, 16..4096)");
    ball->add_option("--out", out, "output base path (writes .svg and .csv)");

    CLI::App* tube = app.add_subcommand("tube", "bracketed tube volume");
    add_pattern(tube);
    tube->add_option("--radius", radius, "tube radius eps")->required();
    tube->add_option("--grid", grid, "cells per side (power of two, 16..4096)");

    CLI::App* tan = app.add_subcommand("tangent", "GH/SWIF convergence table (CSV)");
    add_pattern(tan);
    tan->add_option("--radius", radius, "ball radius r");
    tan->add_option("--scales", scales, "increasing R schedule")->delimiter(',');
    tan->add_option("--grid", grid, "cells per side (power of two, 16..4096)");
    tan->add_option("--samples", samples, "sample count for K and distortion");
    tan->add_option("--seed", seed, "sampling seed");
    tan->add_option("--out", out, "CSV output path (stdout when omitted)");
    tan->add_option("--norm", norm, "fitted | euclidean")
        ->check(CLI::IsMember({"fitted", "euclidean"}));
    tan->add_option("--ksource", ksource, "lemma | sampled K for the bounds")
        ->check(CLI::IsMember({"lemma", "sampled"}));
    tan->add_option("--rfit", rfit, "fitting scale for the gauge norm");
    tan->add_option("--directions", ndirs, "fitting directions");

    CLI::App* nf = app.add_subcommand("normfit", "fit the tangent-cone gauge norm");
    add_pattern(nf);
    nf->add_option("--rfit", rfit, "fitting scale R");
    nf->add_option("--directions", ndirs, "number of directions (>= 16)");
    nf->add_option("--out", out, "JSON output path (stdout when omitted)");

    CLI::App* kb = app.add_subcommand("kbound", "K estimate and Lemma 2.21 bound");
    add_pattern(kb);
    kb->add_option("--samples", samples, "sample count");
    kb->add_option("--seed", seed, "sampling seed");
    kb->add_option("--norm", norm, "fitted | euclidean")
        ->check(CLI::IsMember({"fitted", "euclidean"}));
    kb->add_option("--rfit", rfit, "fitting scale for the gauge norm");
    kb->add_option("--directions", ndirs, "fitting directions");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dist->parsed()) return cmd_dist(pattern, from, to);
        if (inv->parsed()) return cmd_invariants(pattern);
        if (ball->parsed()) return cmd_ball(pattern, center, radius, grid, out);
        if (tube->parsed()) return cmd_tube(pattern, radius, grid);
        if (tan->parsed())
            return cmd_tangent(pattern, radius, scales, grid, samples, seed, out, norm, ksource,
                               rfit, ndirs);
        if (nf->parsed()) return cmd_normfit(pattern, rfit, ndirs, out);
        if (kb->parsed()) return cmd_kbound(pattern, samples, seed, norm, rfit, ndirs);
    } catch (const BadCoords& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadCoords;
    } catch (const BadPattern& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBadPattern;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
