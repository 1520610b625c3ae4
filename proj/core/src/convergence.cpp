#include "smock/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

#include "smock/rng.hpp"

namespace smock {

namespace {

constexpr double kHalfDiag = 0.70710678118654752440;

Vec2 dir(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Andrew monotone chain; collinear points dropped, ccw output.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](Vec2 a, Vec2 b) { return dist(a, b) < 1e-12; }),
              pts.end());
    auto turn_ok = [](Vec2 a, Vec2 b, Vec2 c) {
        Vec2 ab = b - a, bc = c - b;
        return ab.cross(bc) > 1e-7 * ab.norm() * bc.norm();
    };
    std::vector<Vec2> h;
    for (int pass = 0; pass < 2; ++pass) {
        size_t base = h.size();
        for (Vec2 p : pts) {
            while (h.size() >= base + 2 && !turn_ok(h[h.size() - 2], h.back(), p)) h.pop_back();
            h.push_back(p);
        }
        h.pop_back();
        std::reverse(pts.begin(), pts.end());
    }
    return h;
}

std::string generator_of(const std::string& id) { return id.substr(0, id.find('@')); }

}  // namespace

KEstimate estimate_K(const PatternSpec& spec, const NormSpec& F, const AxisBox& box, int samples,
                     std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("estimate_K needs samples >= 2");
    validate_norm(F);
    Smocked sm(spec);
    KEstimate out;
    out.box = box;
    out.samples = samples;
    out.seed = seed;
    for (int i = 0; i < samples; ++i) {
        Vec2 v = uniform_in_box(seed, static_cast<std::uint64_t>(i), box, 0);
        Vec2 w = uniform_in_box(seed, static_cast<std::uint64_t>(i), box, 1);
        double gap = std::fabs(sm.value(v, w) - eval(F, v - w));
        if (gap > out.value) {
            out.value = gap;
            out.witness_a = v;
            out.witness_b = w;
        }
    }
    return out;
}

double estimate_C(const PatternSpec& spec, const NormSpec& F, const AxisBox& window) {
    validate_norm(F);
    std::vector<Stitch> stitches = instantiate(spec, window);
    Smocked sm(spec);
    // d(I, I') is translation invariant per generator pair, so distinct
    // (generator pair, anchor offset) keys dedupe the quadratic pair set.
    std::map<std::tuple<std::string, std::string, long long, long long>, double> cache;
    double C = 0.0;
    for (size_t i = 0; i < stitches.size(); ++i)
        for (size_t j = i + 1; j < stitches.size(); ++j) {
            Vec2 delta = stitches[j].anchor - stitches[i].anchor;
            auto key = std::make_tuple(generator_of(stitches[i].id), generator_of(stitches[j].id),
                                       std::llround(delta.x * 1e9), std::llround(delta.y * 1e9));
            auto it = cache.find(key);
            double d;
            if (it != cache.end()) {
                d = it->second;
            } else {
                d = sm.value(stitches[i].anchor, stitches[j].anchor);
                cache.emplace(key, d);
            }
            C = std::fmax(C, std::fabs(d - eval(F, delta)));
        }
    return C;
}

double lemma_2_21_bound(double h, double C, double dilF, double L) {
    if (h < 0 || C < 0 || dilF < 0 || L < 0)
        throw std::invalid_argument("lemma_2_21_bound needs nonnegative inputs");
    return 2.0 * h + C + 2.0 * dilF * (h + L);
}

KReport k_report(const PatternSpec& spec, const NormSpec& F, const AxisBox& box, int samples,
                 std::uint64_t seed) {
    KReport r;
    r.sampled = estimate_K(spec, F, box, samples, seed);
    std::optional<AxisBox> finite_window;
    if (!spec.periodic()) finite_window = box;
    r.h_hi = depth(spec, 1e-3, finite_window).hi;
    r.C = estimate_C(spec, F, {{-10, -10}, {10, 10}});
    r.dil = norm_stats(F).dil;
    r.L = lengths(spec).second;
    r.lemma_bound = lemma_2_21_bound(r.h_hi, r.C, r.dil, r.L);
    return r;
}

NormSpec fit_norm(const PatternSpec& spec, double R, int n_directions) {
    if (n_directions < 16) throw std::invalid_argument("fit_norm needs n_directions >= 16");
    const double sep = separation(spec);
    if (std::isfinite(sep) && R < 100.0 * sep)
        throw std::invalid_argument("fit_norm needs R >= 100 * separation");
    if (n_directions % 2) ++n_directions;
    Smocked sm(spec);
    std::vector<Vec2> pts;
    pts.reserve(static_cast<size_t>(n_directions));
    for (int i = 0; i < n_directions / 2; ++i) {
        Vec2 u = dir(2.0 * std::numbers::pi * i / n_directions);
        double d = sm.fast_bracket({0, 0}, u * R).hi;
        if (!(d > 0)) throw std::runtime_error("fit_norm: degenerate direction");
        Vec2 v = u * (R / d);
        pts.push_back(v);
        pts.push_back(-v);  // exact symmetrization
    }
    NormSpec g = NormSpec::polygon(convex_hull(pts));
    validate_norm(g);
    return g;
}

double gh_height(double r, double R, double K, double lambda) {
    if (!(r > 0) || !(R > 0) || !(lambda > 0) || K < 0)
        throw std::invalid_argument("gh_height needs r, R, lambda > 0 and K >= 0");
    const double q = K / R;
    return std::sqrt(8.0 * lambda * r * q + q * q);
}

double gh_bound(double r, double R, double K, double lambda) {
    return gh_height(r, R, K, lambda) + K / R;
}

double gh_distortion_bound(const PatternSpec& spec, const NormSpec& F, double r, double R,
                           int samples, std::uint64_t seed) {
    if (samples < 2) throw std::invalid_argument("gh_distortion_bound needs samples >= 2");
    if (!(r > 0) || !(R > 0)) throw std::invalid_argument("gh_distortion_bound needs r, R > 0");
    validate_norm(F);
    Smocked sm(spec);
    const double lambda = norm_stats(F).lambda;
    AxisBox box{{-lambda * r, -lambda * r}, {lambda * r, lambda * r}};
    double worst = 0.0;
    int accepted = 0;
    for (std::uint64_t idx = 0; accepted < samples && idx < 100ULL * samples; ++idx) {
        Vec2 v = uniform_in_box(seed, idx, box, 0);
        Vec2 w = uniform_in_box(seed, idx, box, 1);
        if (eval(F, v) > r || eval(F, w) > r) continue;
        ++accepted;
        double dR = sm.fast_bracket(v * R, w * R).hi / R;
        worst = std::fmax(worst, std::fabs(dR - eval(F, v - w)));
    }
    return 0.5 * worst;
}

SwifRegions swif_regions(const PatternSpec& spec, const NormSpec& F, double r, double R,
                         const AxisBox& window, int n, double K) {
    if (n < 16) throw std::invalid_argument("swif_regions needs n >= 16");
    if (!(r > 0) || !(R > 0) || K < 0)
        throw std::invalid_argument("swif_regions needs r, R > 0 and K >= 0");
    validate_norm(F);
    const double side = window.width();
    if (std::fabs(side - window.height()) > 1e-12 * std::fmax(1.0, side))
        throw std::invalid_argument("swif_regions window must be square");
    NormStats st = norm_stats(F);
    if (window.min.x > -2.0 * st.lambda * r || window.max.x < 2.0 * st.lambda * r)
        throw std::invalid_argument("swif_regions window must cover B_{2 lambda r}(0)");
    Smocked sm(spec);
    const double c = side / n;
    const double m = c * kHalfDiag;
    const double slack = c * std::sqrt(2.0) * (1.0 + st.dil);
    SwifRegions out;
    out.vol_U1.cell_side = out.vol_U2.cell_side = c;
    int violations = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec2 p{window.min.x + (i + 0.5) * c, window.min.y + (j + 0.5) * c};
            const double Fp = eval(F, p);
            auto br = sm.fast_bracket({0, 0}, p * R);
            const double lo = br.lo / R, hi = br.hi / R;
            const bool sure_u1 = Fp - st.dil * m > r && hi + m < r;
            const bool poss_u1 = Fp + st.dil * m > r && lo - m < r;
            const bool sure_u2 = Fp + st.dil * m < r && lo - m > r;
            const bool poss_u2 = Fp - st.dil * m < r && hi + m > r;
            if (sure_u1) out.vol_U1.lo += c * c;
            if (poss_u1) out.vol_U1.hi += c * c;
            if (sure_u2) out.vol_U2.lo += c * c;
            if (poss_u2) out.vol_U2.hi += c * c;
            // Eq. (254): U1 in F^{-1}(r, r + K/R), U2 in F^{-1}(r - K/R, r).
            if (sure_u1 && Fp > r + K / R + slack) ++violations;
            if (sure_u2 && Fp < r - K / R - slack) ++violations;
        }
    out.containment_ok = violations == 0;
    return out;
}

double swif_bound(double r, double R, double K, double lambda, const NormSpec& F,
                  const VolumeBracket& vol_U1, const VolumeBracket& vol_U2) {
    NormStats st = norm_stats(F);
    const int N = kDim;
    const double H = gh_height(r, R, K, lambda);
    const double level = st.alpha * std::pow(r, N - 1);       // Vol(F^{-1}(r))
    const double band = (K / R) * lambda * level;             // one-sided Eq. (256)
    const double u1 = std::fmin(vol_U1.hi, band);
    const double u2 = std::fmin(vol_U2.hi, band);
    return u1 + u2 + H * level + H * std::pow(lambda, N) * unit_ball_volume(N) * std::pow(r, N);
}

ConvergenceReport convergence_table(const PatternSpec& spec, const NormSpec& F, double r,
                                    const std::vector<double>& R_schedule, int grid, int samples,
                                    std::uint64_t seed, KSource ksource) {
    if (R_schedule.empty()) throw std::invalid_argument("empty R schedule");
    for (size_t i = 1; i < R_schedule.size(); ++i)
        if (!(R_schedule[i] > R_schedule[i - 1]))
            throw std::invalid_argument("R schedule must be increasing");
    KReport kr = k_report(spec, F, {{-20, -20}, {20, 20}}, samples, seed);
    const double K = ksource == KSource::Lemma221 ? kr.lemma_bound : kr.sampled.value;
    NormStats st = norm_stats(F);
    const double half = 2.0 * st.lambda * r + 0.5;
    AxisBox window{{-half, -half}, {half, half}};

    ConvergenceReport rep;
    for (double R : R_schedule) {
        ConvergenceRow row;
        row.R = R;
        row.K_over_R = K / R;
        row.H = gh_height(r, R, K, st.lambda);
        row.delta_R = row.H + row.K_over_R;
        SwifRegions sr = swif_regions(spec, F, r, R, window, grid, K);
        row.vol_U1 = sr.vol_U1;
        row.vol_U2 = sr.vol_U2;
        row.M_R = swif_bound(r, R, K, st.lambda, F, sr.vol_U1, sr.vol_U2);
        row.distortion = gh_distortion_bound(spec, F, r, R, samples, seed);
        rep.rows.push_back(row);
    }
    rep.monotone_gh = rep.rows.size() > 1;
    rep.monotone_swif = rep.rows.size() > 1;
    for (size_t i = 1; i < rep.rows.size(); ++i) {
        if (!(rep.rows[i].delta_R < rep.rows[i - 1].delta_R)) rep.monotone_gh = false;
        if (!(rep.rows[i].M_R < rep.rows[i - 1].M_R)) rep.monotone_swif = false;
    }
    return rep;
}

std::string convergence_csv(const ConvergenceReport& report) {
    std::string out = "R,K_over_R,H,delta_R,vol_U1_lo,vol_U1_hi,vol_U2_lo,vol_U2_hi,M_R,distortion\n";
    char buf[512];
    for (const ConvergenceRow& r : report.rows) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.R,
                      r.K_over_R, r.H, r.delta_R, r.vol_U1.lo, r.vol_U1.hi, r.vol_U2.lo,
                      r.vol_U2.hi, r.M_R, r.distortion);
        out += buf;
    }
    return out;
}

}  // namespace smock
