#include "smock/metric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_map>

#include "smock/rng.hpp"

namespace smock {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

double aabb_gap(const AxisBox& a, const AxisBox& b) {
    const double dx = std::fmax(0.0, std::fmax(a.min.x - b.max.x, b.min.x - a.max.x));
    const double dy = std::fmax(0.0, std::fmax(a.min.y - b.max.y, b.min.y - a.max.y));
    return std::hypot(dx, dy);
}

// Distance from point p to generator `gen` translated by t.
ClosestPair point_gap(Vec2 p, const Stitch& gen, Vec2 t) {
    ClosestPair cp = dist_point_components(p - t, gen.components);
    cp.on_a = cp.on_a + t;
    cp.on_b = cp.on_b + t;
    return cp;
}

// Set distance between gen a translated by ta and gen b translated by tb.
ClosestPair stitch_gap(const Stitch& a, Vec2 ta, const Stitch& b, Vec2 tb) {
    // Shift the whole configuration by -ta; only b's relative offset matters.
    const Vec2 dt = tb - ta;
    ClosestPair best{kInf, {}, {}};
    for (const Component& ca : a.components) {
        for (const Component& cb : b.components) {
            ClosestPair cp = closest_pair(ca, cb.translated(dt));
            if (cp.d < best.d) best = cp;
        }
    }
    best.on_a = best.on_a + ta;
    best.on_b = best.on_b + ta;
    return best;
}

// Continued-fraction rational approximation p/q, q <= qmax.
bool rationalize(double x, long qmax, long* p, long* q) {
    long p0 = 1, q0 = 0, p1 = static_cast<long>(std::floor(x)), q1 = 1;
    double frac = x - std::floor(x);
    for (int iter = 0; iter < 40; ++iter) {
        if (std::fabs(x - static_cast<double>(p1) / q1) <= 1e-9 * (1.0 + std::fabs(x))) {
            *p = p1;
            *q = q1;
            return true;
        }
        if (frac < 1e-12) break;
        const double inv = 1.0 / frac;
        const long a = static_cast<long>(std::floor(inv));
        frac = inv - std::floor(inv);
        const long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > qmax) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    return false;
}

struct DirPot {
    double rate = 0.0;  // growth of the potential per unit of projection
    double c = 0.0;     // sawtooth deviation bound
};

struct OrthoPot {
    Vec2 e1, e2;  // orthonormal
    DirPot p1, p2;
};

struct Cand {
    int gen = 0;
    long i = 0, j = 0;
    Vec2 t;                 // lattice translation
    double dv = 0, dw = 0;  // exact Euclidean set distances to the endpoints
};

}  // namespace

struct Smocked::Impl {
    PatternSpec spec;
    bool periodic = false;
    double delta = kInf;    // separation
    double lmax = 0.0;      // max stitch diameter
    double gen_rate = 1.0;  // delta / (delta + lmax)
    Vec2 v1, v2;
    double det = 0.0;
    std::vector<AxisBox> gbounds;
    double max_bbox_diag = 0.0;

    mutable std::once_flag pots_flag;
    mutable std::vector<OrthoPot> pots;

    struct SubDir {
        double ang;
        long i, j;
        Vec2 t;
        double D;
    };
    mutable std::once_flag sub_flag;
    mutable std::vector<SubDir> subdirs;
    mutable std::unordered_map<long long, double> dcache;
    mutable std::mutex dcache_mu;

    explicit Impl(PatternSpec s) : spec(std::move(s)) {
        periodic = spec.periodic();
        delta = smock::separation(spec);
        lmax = lengths(spec).second;
        const double d_eff = std::isfinite(delta) ? delta : 1e12;
        gen_rate = d_eff / (d_eff + lmax);
        if (periodic) {
            v1 = spec.lattice->v1;
            v2 = spec.lattice->v2;
            det = v1.cross(v2);
        }
        for (const Stitch& g : spec.generators) {
            AxisBox b = g.bounds();
            gbounds.push_back(b);
            max_bbox_diag = std::fmax(max_bbox_diag, std::hypot(b.width(), b.height()));
        }
    }

    // --- certified lower bounds ------------------------------------------

    DirPot dir_potential(Vec2 e) const {
        // Projection of the stitch translates onto direction e; a
        // 1-Lipschitz function constant on every stitch gains `rate` per
        // unit of projection, up to a bounded sawtooth deviation.
        const double a = v1.dot(e), b = v2.dot(e);
        double period;
        if (std::fabs(b) < 1e-12 && std::fabs(a) < 1e-12) return {};
        if (std::fabs(b) < 1e-12) {
            period = std::fabs(a);
        } else if (std::fabs(a) < 1e-12) {
            period = std::fabs(b);
        } else {
            long p = 0, q = 0;
            if (!rationalize(a / b, 96, &p, &q)) return {};  // incommensurable
            const long g = std::gcd(std::labs(p), std::labs(q));
            period = std::fabs(b) / static_cast<double>(q / (g == 0 ? 1 : g));
            period = std::fabs(period);
            if (period < 1e-9) return {};
        }
        // Coverage of generator projections modulo the period.
        std::vector<std::pair<double, double>> iv;
        for (const Stitch& g : spec.generators) {
            double lo = kInf, hi = -kInf;
            for (const Component& c : g.components)
                for (Vec2 pt : c.extreme_points()) {
                    const double s = pt.dot(e);
                    lo = std::fmin(lo, s);
                    hi = std::fmax(hi, s);
                }
            if (hi - lo >= period - 1e-12) return {};  // fully covered
            double s = std::fmod(lo, period);
            if (s < 0) s += period;
            const double len = hi - lo;
            if (s + len <= period) {
                iv.push_back({s, s + len});
            } else {
                iv.push_back({s, period});
                iv.push_back({0.0, s + len - period});
            }
        }
        std::sort(iv.begin(), iv.end());
        double covered = 0.0, cur_lo = 0.0, cur_hi = -1.0;
        for (auto& [lo, hi] : iv) {
            if (hi <= cur_hi) continue;
            if (lo > cur_hi) {
                if (cur_hi > cur_lo) covered += cur_hi - cur_lo;
                cur_lo = lo;
            }
            cur_hi = hi;
        }
        if (cur_hi > cur_lo) covered += cur_hi - cur_lo;
        if (covered >= period - 1e-12) return {};
        const double gap = period - covered;
        const double rate = gap / period;
        return {rate, rate * covered};
    }

    void ensure_pots() const {
        std::call_once(pots_flag, [this] {
            if (!periodic) return;
            std::vector<Vec2> dirs = {v1, v2, v1 + v2, v1 - v2};
            std::vector<OrthoPot> out;
            for (Vec2 d : dirs) {
                const double n = d.norm();
                if (n < 1e-12) continue;
                const Vec2 e1 = d / n;
                const Vec2 e2{-e1.y, e1.x};
                bool dup = false;
                for (const OrthoPot& p : out)
                    if (std::fabs(p.e1.cross(e1)) < 1e-9 || std::fabs(p.e2.cross(e1)) < 1e-9)
                        dup = true;
                if (dup) continue;
                OrthoPot p{e1, e2, dir_potential(e1), dir_potential(e2)};
                if (p.p1.rate > 0.0 || p.p2.rate > 0.0) out.push_back(p);
            }
            pots = std::move(out);
        });
    }

    double lb(Vec2 p, Vec2 q) const {
        const Vec2 d = p - q;
        const double n = d.norm();
        if (n == 0.0) return 0.0;
        double best = std::fmax(0.0, (n - lmax)) * gen_rate;
        if (periodic) {
            ensure_pots();
            for (const OrthoPot& pt : pots) {
                const double x1 =
                    std::fmax(0.0, pt.p1.rate * std::fabs(d.dot(pt.e1)) - 2.0 * pt.p1.c);
                const double x2 =
                    std::fmax(0.0, pt.p2.rate * std::fabs(d.dot(pt.e2)) - 2.0 * pt.p2.c);
                best = std::fmax(best, std::hypot(x1, x2));
            }
        }
        return std::fmin(best, n);
    }

    // --- candidate enumeration -------------------------------------------

    // Bounding box of the ellipse {a : |v - a| + |w - a| <= s}.
    AxisBox ellipse_bbox(Vec2 v, Vec2 w, double s) const {
        const double d0 = dist(v, w);
        const Vec2 c = (v + w) * 0.5;
        const double A = 0.5 * s;
        const double B = std::sqrt(std::fmax(0.0, sq(0.5 * s) - sq(0.5 * d0)));
        const Vec2 u = d0 > 0.0 ? (w - v) / d0 : Vec2{1.0, 0.0};
        const double hx = std::sqrt(sq(A * u.x) + sq(B * u.y));
        const double hy = std::sqrt(sq(A * u.y) + sq(B * u.x));
        return {{c.x - hx, c.y - hy}, {c.x + hx, c.y + hy}};
    }

    // Any stitch on a path of cost <= thr has anchor a with
    // lb(v,a) + lb(a,w) <= thr, hence |v-a| + |w-a| <= thr/gen_rate + 2 lmax.
    double anchor_sum(double thr) const { return thr / gen_rate + 2.0 * lmax + 1.0; }

    double sites_estimate(Vec2 v, Vec2 w, double thr) const {
        if (!periodic) return static_cast<double>(spec.generators.size());
        const AxisBox bb = ellipse_bbox(v, w, anchor_sum(thr));
        return bb.area() / std::fabs(det) * static_cast<double>(spec.generators.size());
    }

    void coeff_range(const AxisBox& box, const AxisBox& gb, long* i0, long* i1, long* j0,
                     long* j1) const {
        const AxisBox tb{{box.min.x - gb.max.x, box.min.y - gb.max.y},
                         {box.max.x - gb.min.x, box.max.y - gb.min.y}};
        double ilo = kInf, ihi = -kInf, jlo = kInf, jhi = -kInf;
        for (Vec2 c : {tb.min, Vec2{tb.max.x, tb.min.y}, tb.max, Vec2{tb.min.x, tb.max.y}}) {
            const double ci = (c.x * v2.y - c.y * v2.x) / det;
            const double cj = (v1.x * c.y - v1.y * c.x) / det;
            ilo = std::fmin(ilo, ci);
            ihi = std::fmax(ihi, ci);
            jlo = std::fmin(jlo, cj);
            jhi = std::fmax(jhi, cj);
        }
        *i0 = static_cast<long>(std::floor(ilo)) - 1;
        *i1 = static_cast<long>(std::ceil(ihi)) + 1;
        *j0 = static_cast<long>(std::floor(jlo)) - 1;
        *j1 = static_cast<long>(std::ceil(jhi)) + 1;
    }

    // sound = true: complete set for every path of cost <= thr (filter on
    // the certified lower bound through the anchor).  sound = false: cheap
    // Euclidean elliptical seed set, used only to obtain an upper bound.
    std::vector<Cand> candidates(Vec2 v, Vec2 w, double thr, bool sound) const {
        std::vector<Cand> out;
        auto admit = [&](int gi, long i, long j, Vec2 t) {
            const Stitch& gen = spec.generators[gi];
            if (sound) {
                const Vec2 a = gen.anchor + t;
                if (lb(v, a) + lb(a, w) > thr + 1e-9) return;
            }
            const ClosestPair av = point_gap(v, gen, t);
            if (!sound && av.d > thr + 1e-9) return;
            const ClosestPair aw = point_gap(w, gen, t);
            if (!sound && av.d + aw.d > thr + 1e-9) return;
            out.push_back({gi, i, j, t, av.d, aw.d});
        };
        if (!periodic) {
            for (int gi = 0; gi < static_cast<int>(spec.generators.size()); ++gi)
                admit(gi, 0, 0, {0, 0});
            return out;
        }
        const double s =
            (sound ? anchor_sum(thr) : thr + 1e-6) + 2.0 * max_bbox_diag;
        const AxisBox box = ellipse_bbox(v, w, s);
        for (int gi = 0; gi < static_cast<int>(spec.generators.size()); ++gi) {
            const Vec2 a0 = spec.generators[gi].anchor;
            long i0, i1, j0, j1;
            coeff_range(box, {a0, a0}, &i0, &i1, &j0, &j1);
            for (long i = i0; i <= i1; ++i)
                for (long j = j0; j <= j1; ++j)
                    admit(gi, i, j, v1 * static_cast<double>(i) + v2 * static_cast<double>(j));
        }
        return out;
    }

    // --- shortest-path search --------------------------------------------

    std::string cand_id(const Cand& c) const {
        const std::string& base = spec.generators[c.gen].id;
        if (!periodic) return base;
        return base + "@" + std::to_string(c.i) + "," + std::to_string(c.j);
    }

    struct AStarOut {
        double UB = 0.0;
        int end = -1;  // -1: no stitch path below UB_init found
        std::vector<int> chain;
    };

    AStarOut astar(Vec2 v, Vec2 w, const std::vector<Cand>& cands, double UB_init,
                   bool track) const {
        const int n = static_cast<int>(cands.size());
        AStarOut out{UB_init, -1, {}};
        if (n == 0) return out;
        std::vector<AxisBox> bb(n);
        std::vector<double> h(n), g(n);
        std::vector<int> pred(n, -1);
        for (int k = 0; k < n; ++k) {
            const AxisBox& gb = gbounds[cands[k].gen];
            bb[k] = {gb.min + cands[k].t, gb.max + cands[k].t};
            const Vec2 anchor = spec.generators[cands[k].gen].anchor + cands[k].t;
            h[k] = std::fmax(lb(anchor, w), std::fmax(0.0, cands[k].dw - lmax) * gen_rate);
            g[k] = cands[k].dv;
        }
        std::vector<std::string> ids;
        std::vector<std::vector<int>> seq;
        if (track) {
            ids.resize(n);
            for (int k = 0; k < n; ++k) ids[k] = cand_id(cands[k]);
            seq.assign(n, {});
        }
        // compare hop sequences (with an optional appended element) by
        // stitch-id strings, shorter prefix first
        auto seq_less = [&](const std::vector<int>& a, int extra_a, const std::vector<int>& b) {
            std::size_t ia = 0, ib = 0;
            const std::size_t na = a.size() + (extra_a >= 0 ? 1 : 0), nb = b.size();
            while (ia < na && ib < nb) {
                const std::string& sa = ia < a.size() ? ids[a[ia]] : ids[extra_a];
                const std::string& sb = ids[b[ib]];
                if (sa != sb) return sa < sb;
                ++ia;
                ++ib;
            }
            return na < nb;
        };

        double UB = UB_init;
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
        for (int k = 0; k < n; ++k) {
            if (track) seq[k] = {k};
            const double one = cands[k].dv + cands[k].dw;
            if (one < UB) {
                UB = one;
                out.end = k;
            } else if (track && one == UB && out.end >= 0 && seq_less(seq[k], -1, seq[out.end])) {
                out.end = k;
            }
        }
        for (int k = 0; k < n; ++k)
            if (g[k] + h[k] < UB) heap.push({g[k] + h[k], k});
        long pops = 0;
        const long pop_budget = 64L * n + 1000000L;
        while (!heap.empty()) {
            auto [f, k] = heap.top();
            heap.pop();
            if (f != g[k] + h[k]) continue;  // stale
            if (f >= UB) break;
            if (++pops > pop_budget)
                throw std::runtime_error("smocked_distance: search budget exceeded");
            const double end = g[k] + cands[k].dw;
            if (end < UB) {
                UB = end;
                out.end = k;
            } else if (track && end == UB && out.end >= 0 && seq_less(seq[k], -1, seq[out.end])) {
                out.end = k;  // same value, lex-smaller hop sequence
            }
            const Stitch& gk = spec.generators[cands[k].gen];
            for (int m = 0; m < n; ++m) {
                if (m == k) continue;
                const double base = g[k] + aabb_gap(bb[k], bb[m]);
                if (base + h[m] >= UB) continue;
                if (base > g[m] || (!track && base == g[m])) continue;
                const double wgt =
                    stitch_gap(gk, cands[k].t, spec.generators[cands[m].gen], cands[m].t).d;
                const double cand = g[k] + wgt;
                bool improve = cand < g[m];
                if (!improve && track && cand == g[m] && pred[m] != k)
                    improve = seq_less(seq[k], m, seq[m]);
                if (improve) {
                    g[m] = cand;
                    pred[m] = k;
                    if (track) {
                        seq[m] = seq[k];
                        seq[m].push_back(m);
                    }
                    if (cand + h[m] < UB) heap.push({cand + h[m], m});
                }
            }
        }
        out.UB = UB;
        if (out.end >= 0) {
            if (track) {
                out.chain = seq[out.end];
            } else {
                for (int k = out.end; k >= 0; k = pred[k]) out.chain.push_back(k);
                std::reverse(out.chain.begin(), out.chain.end());
            }
        }
        return out;
    }

    struct Solution {
        double value = 0.0;
        std::vector<int> chain;  // candidate indices in path order
    };

    Solution solve(Vec2 v, Vec2 w, bool want_witness,
                   std::vector<Cand>* cands_out = nullptr) const {
        const double d0 = dist(v, w);
        Solution sol{d0, {}};
        if (d0 == 0.0) return sol;
        if (lb(v, w) >= d0 - 1e-15) return sol;  // direct segment certified optimal
        // Seed upper bound: subadditive composed path at long range, a cheap
        // Euclidean-elliptical pass at short range.
        double seed = d0;
        if (periodic && d0 > 60.0) seed = std::fmin(seed, subadd_ub(v, w));
        if (periodic && seed == d0) {
            std::vector<Cand> c1 = candidates(v, w, d0, false);
            if (c1.size() <= 30000) seed = astar(v, w, c1, d0, false).UB;
        }
        const double thr = std::fmin(seed, d0) * (1.0 + 1e-12) + 1e-12;
        if (sites_estimate(v, w, thr) > 3e6)
            throw std::runtime_error("smocked_distance: query too large for the exact solver");
        std::vector<Cand> cands = candidates(v, w, thr, true);
        if (cands.size() > 200000)
            throw std::runtime_error("smocked_distance: candidate set too large");
        const bool track = want_witness && cands.size() <= 4096;
        AStarOut o = astar(v, w, cands, thr, track);
        if (o.end >= 0 && o.UB < d0) {
            sol.value = o.UB;
            sol.chain = std::move(o.chain);
        }
        if (cands_out) *cands_out = std::move(cands);
        return sol;
    }

    PathWitness witness(Vec2 v, Vec2 w, const Solution& sol,
                        const std::vector<Cand>& cands) const {
        PathWitness pw;
        pw.total = sol.value;
        pw.hops.push_back({kTerminal, v, v});
        if (sol.chain.empty()) {
            pw.hops.push_back({kTerminal, w, w});
            pw.segment_lengths.push_back(dist(v, w));
            return pw;
        }
        // entry/exit points from the closest pairs along the chain
        std::vector<Vec2> entry(sol.chain.size()), exit_(sol.chain.size());
        {
            const Cand& c0 = cands[sol.chain.front()];
            entry.front() = point_gap(v, spec.generators[c0.gen], c0.t).on_b;
        }
        for (std::size_t z = 0; z + 1 < sol.chain.size(); ++z) {
            const Cand& a = cands[sol.chain[z]];
            const Cand& b = cands[sol.chain[z + 1]];
            ClosestPair cp = stitch_gap(spec.generators[a.gen], a.t, spec.generators[b.gen], b.t);
            exit_[z] = cp.on_a;
            entry[z + 1] = cp.on_b;
        }
        {
            const Cand& cl = cands[sol.chain.back()];
            exit_.back() = point_gap(w, spec.generators[cl.gen], cl.t).on_b;
        }
        pw.segment_lengths.push_back(dist(v, entry.front()));
        for (std::size_t z = 0; z < sol.chain.size(); ++z) {
            const Cand& c = cands[sol.chain[z]];
            pw.hops.push_back({cand_id(c), entry[z], exit_[z]});
            if (z + 1 < sol.chain.size())
                pw.segment_lengths.push_back(dist(exit_[z], entry[z + 1]));
        }
        pw.segment_lengths.push_back(dist(exit_.back(), w));
        pw.hops.push_back({kTerminal, w, w});
        return pw;
    }

    // --- subadditive upper bound for long-range queries ------------------

    long long cache_key(long i, long j) const {
        return (i + (1LL << 30)) * (1LL << 32) + (j + (1LL << 30));
    }

    double exact_lattice_dist(long i, long j) const {
        // d̄ between the gen-0 translates at (0,0) and (i,j); cached.
        const long long key = cache_key(i, j);
        {
            std::lock_guard<std::mutex> lk(dcache_mu);
            auto it = dcache.find(key);
            if (it != dcache.end()) return it->second;
        }
        const Vec2 a0 = spec.generators[0].anchor;
        const Vec2 t = v1 * static_cast<double>(i) + v2 * static_cast<double>(j);
        const double d = solve(a0, a0 + t, false).value;
        std::lock_guard<std::mutex> lk(dcache_mu);
        dcache[key] = d;
        return d;
    }

    void ensure_subadd() const {
        std::call_once(sub_flag, [this] {
            if (!periodic) return;
            const double tlo = 20.0, thi = 44.0;
            const double imax = thi * std::fmax(v1.norm(), v2.norm()) / std::fabs(det) + 2.0;
            const long irange = static_cast<long>(imax) + 1;
            struct Pick {
                double score = kInf;
                long i = 0, j = 0;
                Vec2 t;
                bool found = false;
            };
            const int bins = 64;
            std::vector<Pick> picks(bins);
            for (long i = -irange; i <= irange; ++i) {
                for (long j = -irange; j <= irange; ++j) {
                    if (i == 0 && j == 0) continue;
                    const Vec2 t = v1 * static_cast<double>(i) + v2 * static_cast<double>(j);
                    const double n = t.norm();
                    if (n < tlo || n > thi) continue;
                    const double ang = std::atan2(t.y, t.x);
                    int bin = static_cast<int>(std::floor((ang + M_PI) / (2.0 * M_PI) * bins));
                    bin = std::clamp(bin, 0, bins - 1);
                    const double center = -M_PI + (bin + 0.5) * 2.0 * M_PI / bins;
                    const double score = std::fabs(ang - center) + 1e-4 * n;
                    if (score < picks[bin].score) picks[bin] = {score, i, j, t, true};
                }
            }
            // Low-coefficient lattice directions carry the long flat facets
            // of the limit ball; include them at their exact angles so the
            // decomposition cone never straddles those vertices.
            for (long bi = -2; bi <= 2; ++bi) {
                for (long bj = -2; bj <= 2; ++bj) {
                    if (bi == 0 && bj == 0) continue;
                    const Vec2 base = v1 * static_cast<double>(bi) + v2 * static_cast<double>(bj);
                    const double bn = base.norm();
                    if (bn < 1e-12) continue;
                    const long k = std::lround(0.5 * (tlo + thi) / bn);
                    if (k < 1 || k * bn > thi + tlo) continue;
                    picks.push_back({0.0, k * bi, k * bj,
                                     base * static_cast<double>(k), true});
                }
            }
            for (const Pick& p : picks) {
                if (!p.found) continue;
                SubDir sd{std::atan2(p.t.y, p.t.x), p.i, p.j, p.t, 0.0};
                sd.D = exact_lattice_dist(p.i, p.j);
                subdirs.push_back(sd);
            }
            std::sort(subdirs.begin(), subdirs.end(),
                      [](const SubDir& a, const SubDir& b) { return a.ang < b.ang; });
            // one entry per direction
            subdirs.erase(std::unique(subdirs.begin(), subdirs.end(),
                                      [](const SubDir& a, const SubDir& b) {
                                          return std::fabs(a.ang - b.ang) < 1e-12;
                                      }),
                          subdirs.end());
        });
    }

    // Nearest gen-0 translate to p: lattice coefficients and hook-up cost.
    void nearest_translate(Vec2 p, long* oi, long* oj, double* cost) const {
        const Vec2 rel = p - spec.generators[0].anchor;
        const double ci = (rel.x * v2.y - rel.y * v2.x) / det;
        const double cj = (v1.x * rel.y - v1.y * rel.x) / det;
        double best = kInf;
        for (long di = -2; di <= 2; ++di) {
            for (long dj = -2; dj <= 2; ++dj) {
                const long i = static_cast<long>(std::llround(ci)) + di;
                const long j = static_cast<long>(std::llround(cj)) + dj;
                const Vec2 t = v1 * static_cast<double>(i) + v2 * static_cast<double>(j);
                const double d = point_gap(p, spec.generators[0], t).d;
                if (d < best) {
                    best = d;
                    *oi = i;
                    *oj = j;
                }
            }
        }
        *cost = best;
    }

    // Upper bound from an explicit path: hook onto the nearest gen-0
    // translate, compose exactly-solved mid-scale hops along the two
    // lattice directions bracketing the displacement, hook off at the end.
    double subadd_ub(Vec2 v, Vec2 w) const {
        const double d0 = dist(v, w);
        if (!periodic) return d0;
        ensure_subadd();
        if (subdirs.size() < 8) return d0;
        long iv_ = 0, jv_ = 0, iw_ = 0, jw_ = 0;
        double cv = 0.0, cw = 0.0;
        nearest_translate(v, &iv_, &jv_, &cv);
        nearest_translate(w, &iw_, &jw_, &cw);
        const long di = iw_ - iv_, dj = jw_ - jv_;
        const Vec2 ds = v1 * static_cast<double>(di) + v2 * static_cast<double>(dj);
        // Only displacements shorter than the solver's subadd-seeding
        // threshold (60) may be solved exactly here, or the two paths
        // recurse into each other.
        const double kExactCap = 58.0;
        // Cost of covering a residual displacement: exact below the cap,
        // otherwise greedy peeling of exactly-solved table hops.
        auto cover = [&](long ri, long rj) -> double {
            Vec2 r = v1 * static_cast<double>(ri) + v2 * static_cast<double>(rj);
            double acc = 0.0;
            for (int guard = 0; r.norm() > kExactCap && guard < 64; ++guard) {
                const SubDir* best = nullptr;
                double best_left = r.norm();
                for (const SubDir& s : subdirs) {
                    const double left = (r - s.t).norm();
                    if (left < best_left) {
                        best_left = left;
                        best = &s;
                    }
                }
                if (!best || best_left > r.norm() - 1.0) return kInf;
                acc += best->D;
                r = r - best->t;
                ri -= best->i;
                rj -= best->j;
            }
            if (r.norm() > kExactCap) return kInf;
            return acc + exact_lattice_dist(ri, rj);
        };
        double mid;
        if (ds.norm() <= kExactCap) {
            mid = exact_lattice_dist(di, dj);
        } else {
            mid = cover(di, dj);
            const double ang = std::atan2(ds.y, ds.x);
            std::size_t hi = 0;
            while (hi < subdirs.size() && subdirs[hi].ang < ang) ++hi;
            const SubDir& q = subdirs[hi % subdirs.size()];
            const SubDir& p = subdirs[(hi + subdirs.size() - 1) % subdirs.size()];
            // composed path m*p + n*q + residual
            auto compose = [&](long m, long pi, long pj, double pD, long n, long qi, long qj,
                               double qD) {
                if (m < 0 || n < 0) return;
                const double c = static_cast<double>(m) * pD + static_cast<double>(n) * qD +
                                 cover(di - m * pi - n * qi, dj - m * pj - n * qj);
                mid = std::fmin(mid, c);
            };
            const double pq_det = p.t.cross(q.t);
            if (std::fabs(pq_det) > 1e-9) {
                const long m = static_cast<long>(std::floor(ds.cross(q.t) / pq_det));
                const long n = static_cast<long>(std::floor(p.t.cross(ds) / pq_det));
                compose(m, p.i, p.j, p.D, n, q.i, q.j, q.D);
            }
            // single-direction variants with a short remainder
            for (const SubDir* s : {&p, &q}) {
                const long m = static_cast<long>(std::floor(ds.dot(s->t) / s->t.norm2()));
                compose(m, s->i, s->j, s->D, 0, 0, 0, 0.0);
            }
            if (!std::isfinite(mid)) return d0;
        }
        return std::fmin(d0, cv + mid + cw);
    }
};

// ---------------------------------------------------------------------------

Smocked::Smocked(PatternSpec spec) : impl_(std::make_unique<Impl>(std::move(spec))) {}
Smocked::~Smocked() = default;
Smocked::Smocked(Smocked&&) noexcept = default;
Smocked& Smocked::operator=(Smocked&&) noexcept = default;

const PatternSpec& Smocked::spec() const { return impl_->spec; }
double Smocked::separation() const { return impl_->delta; }
double Smocked::max_length() const { return impl_->lmax; }

namespace {
// Queries are canonicalized to a lexicographic endpoint order so that
// d(v, w) and d(w, v) take the same code path and agree bit for bit.
bool lex_before(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y <= b.y); }

PathWitness reversed(PathWitness wit) {
    std::reverse(wit.hops.begin(), wit.hops.end());
    for (Hop& h : wit.hops) std::swap(h.entry, h.exit);
    std::reverse(wit.segment_lengths.begin(), wit.segment_lengths.end());
    return wit;
}
}  // namespace

std::pair<double, PathWitness> Smocked::distance(Vec2 v, Vec2 w) const {
    const bool swapped = !lex_before(v, w);
    if (swapped) std::swap(v, w);
    std::vector<Cand> cands;
    Impl::Solution sol = impl_->solve(v, w, true, &cands);
    PathWitness wit = impl_->witness(v, w, sol, cands);
    if (swapped) wit = reversed(std::move(wit));
    return {sol.value, std::move(wit)};
}

double Smocked::value(Vec2 v, Vec2 w) const {
    if (!lex_before(v, w)) std::swap(v, w);
    return impl_->solve(v, w, false).value;
}

double Smocked::lower_bound(Vec2 v, Vec2 w) const {
    if (!lex_before(v, w)) std::swap(v, w);
    return impl_->lb(v, w);
}

Smocked::DistBracket Smocked::bracket(Vec2 v, Vec2 w) const {
    if (!lex_before(v, w)) std::swap(v, w);
    const double d0 = dist(v, w);
    double seed = d0;
    if (impl_->periodic && d0 > 60.0) seed = std::fmin(seed, impl_->subadd_ub(v, w));
    if (impl_->sites_estimate(v, w, seed * (1.0 + 1e-12) + 1e-12) <= 5000.0) {
        const double val = impl_->solve(v, w, false).value;
        return {val, val, true};
    }
    return {impl_->lb(v, w), seed, false};
}

Smocked::DistBracket Smocked::fast_bracket(Vec2 v, Vec2 w) const {
    if (!lex_before(v, w)) std::swap(v, w);
    const double d0 = dist(v, w);
    double hi = d0;
    if (impl_->periodic && d0 > 60.0) hi = std::fmin(hi, impl_->subadd_ub(v, w));
    const double lo = std::fmin(impl_->lb(v, w), hi);
    return {lo, hi, hi <= lo + 1e-12 * std::fmax(1.0, hi)};
}

Smocked::SourceField Smocked::source_field(Vec2 x0, const AxisBox& window) const {
    const Impl& im = *impl_;
    AxisBox hull{{std::fmin(window.min.x, x0.x), std::fmin(window.min.y, x0.y)},
                 {std::fmax(window.max.x, x0.x), std::fmax(window.max.y, x0.y)}};
    // Every stitch on an optimal path from x0 to any p in the window has
    // anchor in the ellipse {lb(x0,a) + lb(a,p) <= |x0 - p|}; pad the hull
    // by the Euclidean half-width of that region at the worst p.
    const double diam = std::hypot(hull.width(), hull.height());
    const double s = im.anchor_sum(diam);
    const double pad =
        std::sqrt(std::fmax(0.0, sq(0.5 * s) - sq(0.5 * diam))) + im.max_bbox_diag + 1.0;
    hull = {{hull.min.x - pad, hull.min.y - pad}, {hull.max.x + pad, hull.max.y + pad}};
    SourceField f;
    f.x0 = x0;
    f.stitches = instantiate(im.spec, hull);
    const int n = static_cast<int>(f.stitches.size());
    if (n > 20000)
        throw std::runtime_error("source_field: window too large, use bracket queries instead");
    f.dist.assign(n, kInf);
    std::vector<double> g(n);
    std::vector<AxisBox> bb(n);
    for (int k = 0; k < n; ++k) {
        g[k] = dist_point_components(x0, f.stitches[k].components).d;
        bb[k] = f.stitches[k].bounds();
    }
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> heap;
    for (int k = 0; k < n; ++k) heap.push({g[k], k});
    std::vector<char> done(n, 0);
    while (!heap.empty()) {
        auto [d, k] = heap.top();
        heap.pop();
        if (done[k] || d != g[k]) continue;
        done[k] = 1;
        f.dist[k] = d;
        for (int m = 0; m < n; ++m) {
            if (done[m] || m == k) continue;
            if (d + aabb_gap(bb[k], bb[m]) >= g[m]) continue;
            const double cand =
                d + dist_components(f.stitches[k].components, f.stitches[m].components).d;
            if (cand < g[m]) {
                g[m] = cand;
                heap.push({cand, m});
            }
        }
    }
    f.order.resize(n);
    for (int k = 0; k < n; ++k) f.order[k] = k;
    std::sort(f.order.begin(), f.order.end(),
              [&](std::size_t a, std::size_t b) { return f.dist[a] < f.dist[b]; });
    return f;
}

double Smocked::field_value(const SourceField& f, Vec2 p) {
    double best = dist(f.x0, p);
    for (std::size_t idx : f.order) {
        const double base = f.dist[idx];
        if (base >= best) break;
        const double d = base + dist_point_components(p, f.stitches[idx].components).d;
        if (d < best) best = d;
    }
    return best;
}

// ---------------------------------------------------------------------------

std::pair<double, PathWitness> smocked_distance(const PatternSpec& spec, Vec2 v, Vec2 w) {
    Smocked sm(spec);
    return sm.distance(v, w);
}

double layered_oracle(const PatternSpec& spec, Vec2 v, Vec2 w, int k_max) {
    const double d0 = dist(v, w);
    if (k_max <= 0 || d0 == 0.0) return d0;
    Smocked sm(spec);
    const double lmax = lengths(spec).second;
    const double delta = smock::separation(spec);
    const double d_eff = std::isfinite(delta) ? delta : 1e12;
    const double rate = d_eff / (d_eff + lmax);

    // Explicit d_k dynamic program over (stitch, layer) states with the
    // adjacent-distinctness constraint, on a materialized candidate set.
    auto dp = [&](const std::vector<const Stitch*>& st, const std::vector<double>& dv,
                  const std::vector<double>& dw) {
        const int n = static_cast<int>(st.size());
        std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                M[i][j] = M[j][i] = dist_components(st[i]->components, st[j]->components).d;
        std::vector<double> A = dv, B(n);
        double best = d0;
        for (int k = 1; k <= k_max; ++k) {
            for (int j = 0; j < n; ++j) best = std::fmin(best, A[j] + dw[j]);
            if (k == k_max) break;
            if (static_cast<double>(k) * d_eff >= best) break;
            for (int jp = 0; jp < n; ++jp) {
                double m = kInf;
                for (int j = 0; j < n; ++j) {
                    if (j == jp || A[j] >= m) continue;
                    const double cand = A[j] + M[j][jp];
                    if (cand < m) m = cand;
                }
                B[jp] = m;
            }
            A.swap(B);
        }
        return best;
    };

    auto materialize = [&](double reach, double thr, bool sound,
                           std::vector<const Stitch*>* st, std::vector<double>* dv,
                           std::vector<double>* dw, std::vector<Stitch>* storage) {
        const Vec2 c = (v + w) * 0.5;
        const double half = 0.5 * reach + lmax + 1.0;
        const AxisBox box{{c.x - half, c.y - half}, {c.x + half, c.y + half}};
        *storage = instantiate(spec, box);
        for (const Stitch& s : *storage) {
            const double a = dist_point_components(v, s.components).d;
            const double b = dist_point_components(w, s.components).d;
            if (!sound && a + b > thr + 1e-9) continue;
            if (sound && sm.lower_bound(v, s.anchor) + sm.lower_bound(s.anchor, w) > thr + 1e-9)
                continue;
            st->push_back(&s);
            dv->push_back(a);
            dw->push_back(b);
        }
    };

    // Phase 1: Euclidean elliptical seed set (upper bound only).
    double best = d0;
    std::vector<Stitch> store1;
    {
        std::vector<const Stitch*> st;
        std::vector<double> dv, dw;
        materialize(d0, d0, false, &st, &dv, &dw, &store1);
        if (!st.empty()) best = dp(st, dv, dw);
    }
    // Phase 2: complete set for every configuration of cost <= best.
    const double thr = best * (1.0 + 1e-12) + 1e-12;
    std::vector<Stitch> store2;
    std::vector<const Stitch*> st;
    std::vector<double> dv, dw;
    materialize(thr / rate + 2.0 * lmax, thr, true, &st, &dv, &dw, &store2);
    if (st.size() > 4000) throw std::runtime_error("layered_oracle: candidate set too large");
    if (!st.empty()) best = std::fmin(best, dp(st, dv, dw));
    return best;
}

double distance_point_to_stitchpoint(const PatternSpec& spec, Vec2 v,
                                     const std::string& stitch_id) {
    // d̄ to the identified point equals d̄ to any point on the stitch;
    // use its anchor.
    Vec2 anchor;
    bool found = false;
    const auto at = stitch_id.find('@');
    const std::string base = at == std::string::npos ? stitch_id : stitch_id.substr(0, at);
    for (const Stitch& g : spec.generators) {
        if (g.id != base) continue;
        anchor = g.anchor;
        found = true;
        if (at != std::string::npos) {
            if (!spec.lattice)
                throw std::invalid_argument(
                    "distance_point_to_stitchpoint: '@' id on a finite pattern");
            const std::string coords = stitch_id.substr(at + 1);
            const auto comma = coords.find(',');
            if (comma == std::string::npos)
                throw std::invalid_argument("distance_point_to_stitchpoint: malformed id " +
                                            stitch_id);
            const long i = std::stol(coords.substr(0, comma));
            const long j = std::stol(coords.substr(comma + 1));
            anchor = anchor + spec.lattice->v1 * static_cast<double>(i) +
                     spec.lattice->v2 * static_cast<double>(j);
        }
        break;
    }
    if (!found)
        throw std::invalid_argument("distance_point_to_stitchpoint: unknown stitch id " +
                                    stitch_id);
    Smocked sm(spec);
    return sm.value(v, anchor);
}

double rho(const PatternSpec& spec, Vec2 x0, Vec2 v) {
    Smocked sm(spec);
    return sm.value(x0, v);
}

double rescaled_distance(const RescaledMetric& metric, Vec2 x, Vec2 y) {
    if (!(metric.R > 0.0)) throw std::invalid_argument("rescaled_distance: R must be positive");
    Smocked sm(metric.base);
    return sm.value(x * metric.R, y * metric.R) / metric.R;
}

SandwichResult bilipschitz_sandwich_check(const PatternSpec& spec, const AxisBox& window,
                                          double r, int samples, std::uint64_t seed) {
    if (!(r > 0.0))
        throw std::invalid_argument("bilipschitz_sandwich_check: r must be positive");
    Smocked sm(spec);
    const AxisBox padded{{window.min.x - r - 1.0, window.min.y - r - 1.0},
                         {window.max.x + r + 1.0, window.max.y + r + 1.0}};
    const std::vector<Stitch> stitches = instantiate(spec, padded);
    auto off_tube = [&](std::uint64_t idx, std::uint64_t lane, Vec2* out) {
        for (std::uint64_t t = 0; t < 256; ++t) {
            const Vec2 p = uniform_in_box(seed, idx, window, lane * 256 + t);
            if (distance_to_pattern(p, stitches) > r) {
                *out = p;
                return true;
            }
        }
        return false;
    };
    SandwichResult res;
    res.min_ratio = kInf;
    res.max_ratio = 0.0;
    double dmax = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec2 p, q;
        if (!off_tube(i, 0, &p) || !off_tube(i, 1, &q))
            throw std::runtime_error("bilipschitz_sandwich_check: window is inside the tube");
        const double de = dist(p, q);
        if (de < 1e-12) continue;
        const double db = sm.value(p, q);
        dmax = std::fmax(dmax, db);
        const double ratio = db / de;
        res.min_ratio = std::fmin(res.min_ratio, ratio);
        res.max_ratio = std::fmax(res.max_ratio, ratio);
        ++res.pairs;
    }
    if (res.pairs == 0) throw std::runtime_error("bilipschitz_sandwich_check: no usable pairs");
    // Diameter bound of the pre-image region all sampled points live in:
    // everything d̄-reachable within R_thr of the window center, located by
    // inverting the certified lower bound along a direction fan (the bound
    // is nondecreasing along each ray).
    const Vec2 c = window.center();
    const double rthr = dmax + 0.5 * std::hypot(window.width(), window.height());
    double extent = 0.0;
    for (int k = 0; k < 256; ++k) {
        const double th = 2.0 * M_PI * k / 256.0;
        const Vec2 u{std::cos(th), std::sin(th)};
        double lo = 0.0;
        double hi = 4.0 * rthr / std::fmax(1e-9, sm.lower_bound({0, 0}, u * 1e9) / 1e9) +
                    4.0 * sm.max_length() + 4.0;
        for (int it = 0; it < 60; ++it) {
            const double midp = 0.5 * (lo + hi);
            if (sm.lower_bound(c, c + u * midp) <= rthr)
                lo = midp;
            else
                hi = midp;
        }
        extent = std::fmax(extent, hi);
    }
    res.diam_estimate = 2.0 * extent;
    res.lower_bound = std::fmin(1.0, r / res.diam_estimate);
    res.ok = res.max_ratio <= 1.0 + 1e-12 && res.min_ratio >= res.lower_bound - 1e-9;
    return res;
}

}  // namespace smock
