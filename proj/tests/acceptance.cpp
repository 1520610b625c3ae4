// Acceptance gate: one line per criterion, nonzero exit on any failure.
// argv[1] is the smocklab binary (used by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "smock/convergence.hpp"
#include "smock/metric.hpp"
#include "smock/norm.hpp"
#include "smock/pattern.hpp"
#include "smock/raster.hpp"
#include "smock/rng.hpp"

using namespace smock;

namespace {

int g_failures = 0;

void report(int n, bool ok, const std::string& what) {
    std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

PatternSpec load(const std::string& name) {
    return load_pattern_file(std::string(SMOCKLAB_PATTERNS_DIR) + "/" + name + ".json");
}

PatternSpec unit_segment_pattern() {
    PatternSpec spec;
    spec.name = "unit_segment";
    spec.generators.push_back({"seg", {Component::segment({0, 0}, {1, 0})}, {0, 0}});
    return spec;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = int(x.size());
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::string> names{"two_segments", "lattice_2x1", "point_lattice"};

    // 1: oracle equivalence, 1000 pairs per pattern in a 40x40 window, < 60 s
    {
        auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        AxisBox box{{-20, -20}, {20, 20}};
        for (const auto& name : names) {
            auto spec = load(name);
            Smocked sm(spec);
            double sep = separation(spec);
            for (int t = 0; t < 1000 && ok; ++t) {
                Vec2 v = uniform_in_box(1001, t, box, 0);
                Vec2 w = uniform_in_box(1001, t, box, 1);
                int k = int(std::ceil(dist(v, w) / sep)) + 1;
                double ds = sm.value(v, w);
                double dor = layered_oracle(spec, v, w, k);
                if (std::fabs(ds - dor) > 1e-9) ok = false;
            }
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ostringstream msg;
        msg << "oracle equivalence, 3x1000 pairs in " << secs << " s";
        report(1, ok && secs < 60.0, msg.str());
    }

    // 2: metric axioms on 1e4 triples per pattern
    {
        bool ok = true;
        AxisBox box{{-6, -6}, {6, 6}};
        for (const auto& name : names) {
            auto spec = load(name);
            Smocked sm(spec);
            for (int t = 0; t < 10000 && ok; ++t) {
                Vec2 u = uniform_in_box(1002, t, box, 0);
                Vec2 v = uniform_in_box(1002, t, box, 1);
                Vec2 w = uniform_in_box(1002, t, box, 2);
                double duv = sm.value(u, v);
                if (sm.value(v, u) != duv) ok = false;
                if (duv > dist(u, v) + 1e-12) ok = false;
                if (sm.value(u, w) > duv + sm.value(v, w) + 1e-9) ok = false;
            }
        }
        report(2, ok, "symmetry exact, d <= d_E + 1e-12, triangle to 1e-9 on 3x10^4 triples");
    }

    // 3: calibration, K = 0 case
    {
        auto spec = load("point_lattice");
        auto khat = estimate_K(spec, NormSpec::euclidean(), AxisBox{{-20, -20}, {20, 20}},
                               10000, 1003);
        auto rep = convergence_table(spec, NormSpec::euclidean(), 1.0, {10.0, 100.0, 1000.0},
                                     64, 500, 1003, KSource::Sampled);
        bool ok = khat.value <= 1e-12 && rep.rows.size() == 3;
        for (const auto& row : rep.rows)
            if (row.delta_R != 0.0 || row.M_R != 0.0) ok = false;
        report(3, ok, "point lattice: K_hat <= 1e-12 on 10^4 pairs, delta_R = M_R = 0");
    }

    // 4: lattice_2x1 exact axis distances
    {
        auto spec = load("lattice_2x1");
        Smocked sm(spec);
        bool ok = true;
        for (int n = 1; n <= 3; ++n) {
            if (std::fabs(layered_oracle(spec, {0, 0}, {2.0 * n, 0}, n + 1) - n) > 1e-9)
                ok = false;
            if (std::fabs(layered_oracle(spec, {0, 0}, {0, double(n)}, n + 1) - n) > 1e-9)
                ok = false;
        }
        for (int n = 1; n <= 10; ++n) {
            if (std::fabs(sm.value({0, 0}, {2.0 * n, 0}) - n) > 1e-9) ok = false;
            if (std::fabs(sm.value({0, 0}, {0, double(n)}) - n) > 1e-9) ok = false;
        }
        report(4, ok, "d((0,0),(2n,0)) = n and d((0,0),(0,m)) = m, n,m in 1..10");
    }

    // 5: tube volume brackets at grid 512
    {
        auto spec = unit_segment_pattern();
        AxisBox win{{-0.25, -0.75}, {1.25, 0.75}};
        bool ok = true;
        for (double eps : {0.05, 0.1, 0.2}) {
            auto vol = tube_raster_volume(spec, eps, win, 512);
            double truth = std::numbers::pi * eps * eps + 2.0 * eps;
            if (!(vol.lo <= truth && truth <= vol.hi)) ok = false;
            if (!(vol.hi - vol.lo < 0.1 * truth)) ok = false;
        }
        report(5, ok, "tube brackets contain pi eps^2 + 2 eps, width < 10%");
    }

    // 6: small-ball shapes on lattice_2x1, r = 0.5, grid 512
    {
        auto spec = load("lattice_2x1");
        double r = 0.5;
        // deep point: ball is a Euclidean disk
        auto deep = ball_volume(
            rasterize_rho(spec, {1.5, 0.5}, AxisBox{{0.3, -0.7}, {2.7, 1.7}}, 512), r);
        double disk = std::numbers::pi * r * r;
        bool ok = deep.lo <= disk && disk <= deep.hi && !deep.edge_warning;
        // on-stitch point: ball is the stitch stadium
        auto stitch = ball_volume(
            rasterize_rho(spec, {0.5, 0.0}, AxisBox{{-1.0, -1.5}, {2.0, 1.5}}, 512), r);
        double stadium = disk + 2.0 * r * 1.0;
        if (!(stitch.lo <= stadium && stadium <= stitch.hi && !stitch.edge_warning)) ok = false;
        report(6, ok, "r < D: bracket contains pi r^2; on stitch: contains pi r^2 + 2 r L");
    }

    // 7: niceness
    {
        auto spec = load("lattice_2x1");
        AxisBox win{{0, 0}, {4, 4}};
        std::vector<double> eps{0.2, 0.1, 0.05, 0.01};
        std::vector<BracketedLength> vols;
        auto stitches = instantiate(spec, AxisBox{win.min - Vec2{1, 1}, win.max + Vec2{1, 1}});
        for (double e : eps) vols.push_back(tube_area_bracket(stitches, e, win, 4096));
        bool ok = true;
        for (std::size_t k = 1; k < vols.size(); ++k)
            if (!(vols[k].hi < vols[k - 1].lo)) ok = false;  // certified strict decrease
        if (!(vols.back().hi < 0.2)) ok = false;
        auto box = load("box_stitch");
        auto bst = instantiate(box, AxisBox{{-1, -1}, {2, 2}});
        auto last = tube_area_bracket(bst, 0.01, AxisBox{{-0.5, -0.5}, {1.5, 1.5}}, 512);
        if (!(last.lo >= 0.9 && last.hi <= 1.1)) ok = false;
        report(7, ok, "lattice tubes decrease with last hi < 0.2; box tube stays near 1");
    }

    // 8: chart telescope, R = 3, grid 512, k <= 20
    {
        auto spec = load("lattice_2x1");
        Vec2 x0{0.5, 0.0};
        auto raster = rasterize_rho(spec, x0, AxisBox{{-8.25, -8.75}, {9.25, 8.75}}, 512);
        auto ball = ball_volume(raster, 3.0);
        auto chart = chart_decomposition_volumes(raster, spec, 3.0, 20);
        double lo = chart.tail.lo, hi = chart.tail.hi;
        for (const auto& p : chart.parts) {
            lo += p.lo;
            hi += p.hi;
        }
        bool ok = lo <= ball.hi + 1e-9 && hi >= ball.lo - 1e-9 && !ball.edge_warning;
        report(8, ok, "sum of chart brackets overlaps the R = 3 ball bracket");
    }

    // 9: norm constants and triangle inequality
    {
        bool ok = true;
        auto fp = norm_stats(NormSpec::f_plus());
        const double s2 = std::numbers::sqrt2;
        if (std::fabs(fp.unit_area - 18.0) > 1e-9 || std::fabs(fp.alpha - 12.0 * s2) > 1e-9 ||
            std::fabs(fp.dil - s2 / 3.0) > 1e-9 || std::fabs(fp.lambda - 3.0) > 1e-9)
            ok = false;
        auto ft = norm_stats(NormSpec::f_T());
        if (std::fabs(ft.unit_area - 8.0) > 1e-9 || std::fabs(ft.alpha - 8.0 * s2) > 1e-9 ||
            std::fabs(ft.dil - s2 / 2.0) > 1e-9 || std::fabs(ft.lambda - 2.0) > 1e-9)
            ok = false;
        // F_square octagon vertices
        double t = 3.0 / (2.0 * s2);
        std::vector<Vec2> octagon{{1.5, 0}, {t, t}, {0, 1.5}, {-t, t},
                                  {-1.5, 0}, {-t, -t}, {0, -1.5}, {t, -t}};
        auto poly = unit_ball_polygon(NormSpec::f_square(), 8);
        if (poly.size() != 8) ok = false;
        for (const auto& v : octagon) {
            bool found = false;
            for (const auto& p : poly)
                if (dist(p, v) < 1e-9) found = true;
            if (!found) ok = false;
        }
        AxisBox box{{-5, -5}, {5, 5}};
        int which = 0;
        for (auto F : {NormSpec::f_plus(), NormSpec::f_T(), NormSpec::f_square()}) {
            ++which;
            for (int i = 0; i < 100000 && ok; ++i) {
                Vec2 u = uniform_in_box(1009 + which, i, box, 0);
                Vec2 v = uniform_in_box(1009 + which, i, box, 1);
                if (eval(F, u + v) > eval(F, u) + eval(F, v) + 1e-9) ok = false;
            }
        }
        report(9, ok, "F_plus / F_T / F_square constants exact, triangle on 10^5 pairs each");
    }

    // 10-12: GH and SWIF rates on lattice_2x1 with the fitted gauge
    {
        auto spec = load("lattice_2x1");
        auto F = fit_norm(spec, 1000.0, 64);
        std::vector<double> schedule{10.0, 100.0, 1000.0, 10000.0};
        auto rep = convergence_table(spec, F, 1.0, schedule, 64, 500, 1010, KSource::Lemma221);
        bool ok10 = rep.rows.size() == 4 && rep.monotone_gh;
        std::vector<double> lx, ly;
        for (const auto& row : rep.rows) {
            lx.push_back(std::log(row.R));
            ly.push_back(std::log(row.delta_R));
        }
        double slope = fit_slope(lx, ly);
        if (!(slope >= -0.6 && slope <= -0.4)) ok10 = false;
        {
            std::ostringstream msg;
            msg << "delta_R strictly decreasing, log-log slope " << slope;
            report(10, ok10, msg.str());
        }

        bool ok11 = rep.monotone_swif;
        auto stats = norm_stats(F);
        for (const auto& row : rep.rows) {
            double half = 2.0 * stats.lambda * 1.0 + 0.5;
            double K = row.K_over_R * row.R;
            auto reg = swif_regions(spec, F, 1.0, row.R,
                                    AxisBox{{-half, -half}, {half, half}}, 64, K);
            if (!reg.containment_ok) ok11 = false;
        }
        report(11, ok11, "Eq. 254 containment holds per cell, M_R strictly decreasing");

        bool ok12 = true;
        for (const auto& row : rep.rows) {
            if (row.R < 100.0) continue;
            if (!(row.distortion <= row.delta_R + 1e-12)) ok12 = false;
        }
        report(12, ok12, "gh_distortion_bound <= gh_bound for R >= 100");
    }

    // 13: bi-Lipschitz sandwich
    {
        auto spec = load("lattice_2x1");
        auto res = bilipschitz_sandwich_check(spec, AxisBox{{-5, -5}, {5, 5}}, 0.25, 1000, 1013);
        bool ok = res.ok && res.max_ratio <= 1.0 + 1e-12 &&
                  res.min_ratio >= res.lower_bound - 1e-9;
        report(13, ok, "1000 ratios off the tube within the sandwich");
    }

    // 14: determinism of the tangent CSV via the CLI
    {
        bool ok = false;
        if (argc > 1) {
            std::string bin = argv[1];
            std::string pat = std::string(SMOCKLAB_PATTERNS_DIR) + "/point_lattice.json";
            std::string base = bin + " tangent --pattern " + pat +
                               " --norm euclidean --ksource sampled --scales 10,100"
                               " --grid 64 --samples 200 --seed 5 --out ";
            int rc1 = std::system((base + "accept_a.csv >/dev/null 2>&1").c_str());
            int rc2 = std::system((base + "accept_b.csv >/dev/null 2>&1").c_str());
            if (rc1 == 0 && rc2 == 0) {
                auto a = slurp("accept_a.csv");
                ok = !a.empty() && a == slurp("accept_b.csv");
            }
            std::remove("accept_a.csv");
            std::remove("accept_b.csv");
        }
        report(14, ok, "repeated cmd_tangent runs produce byte-identical CSV");
    }

    return g_failures == 0 ? 0 : 1;
}
