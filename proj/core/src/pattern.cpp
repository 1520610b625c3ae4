#include "smock/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "smock/rng.hpp"

namespace smock {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

AxisBox Stitch::bounds() const {
    AxisBox b{{kInf, kInf}, {-kInf, -kInf}};
    for (const Component& c : components) {
        AxisBox cb = c.bounds();
        b.min.x = std::fmin(b.min.x, cb.min.x);
        b.min.y = std::fmin(b.min.y, cb.min.y);
        b.max.x = std::fmax(b.max.x, cb.max.x);
        b.max.y = std::fmax(b.max.y, cb.max.y);
    }
    return b;
}

double Stitch::diameter() const {
    std::vector<Vec2> pts;
    for (const Component& c : components) {
        auto e = c.extreme_points();
        pts.insert(pts.end(), e.begin(), e.end());
    }
    double d = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) d = std::fmax(d, dist(pts[i], pts[j]));
    return d;
}

bool Stitch::contains(Vec2 p, double tol) const {
    return dist_point_components(p, components).d <= tol;
}

AxisBox PatternSpec::fundamental_domain() const {
    if (!lattice) throw std::logic_error("fundamental_domain: pattern is not periodic");
    const Vec2 v1 = lattice->v1, v2 = lattice->v2;
    AxisBox b{{0, 0}, {0, 0}};
    for (Vec2 p : {v1, v2, v1 + v2}) {
        b.min.x = std::fmin(b.min.x, p.x);
        b.min.y = std::fmin(b.min.y, p.y);
        b.max.x = std::fmax(b.max.x, p.x);
        b.max.y = std::fmax(b.max.y, p.y);
    }
    return b;
}

double PatternSpec::max_generator_diameter() const {
    double d = 0.0;
    for (const Stitch& s : generators) d = std::fmax(d, s.diameter());
    return d;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const char* where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument(std::string("pattern json: unknown key '") + it.key() +
                                        "' in " + where);
    }
}

Vec2 parse_vec(const json& j, const char* where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(std::string("pattern json: expected [x,y] in ") + where);
    return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

PatternSpec load_pattern_json(const std::string& text) {
    json j = json::parse(text);
    require_keys(j, {"name", "dimension", "generators", "lattice"}, "root");
    PatternSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.dimension = j.at("dimension").get<int>();
    if (spec.dimension != 2)
        throw std::invalid_argument("pattern json: only dimension 2 is supported");
    for (const json& g : j.at("generators")) {
        require_keys(g, {"id", "anchor", "segments", "boxes"}, "generator");
        Stitch s;
        s.id = g.at("id").get<std::string>();
        if (g.contains("segments"))
            for (const json& seg : g["segments"])
                s.components.push_back(
                    Component::segment(parse_vec(seg.at(0), "segment"), parse_vec(seg.at(1), "segment")));
        if (g.contains("boxes"))
            for (const json& bx : g["boxes"]) {
                Vec2 lo = parse_vec(bx.at(0), "box");
                Vec2 hi = parse_vec(bx.at(1), "box");
                if (hi.x < lo.x || hi.y < lo.y)
                    throw std::invalid_argument("pattern json: box min/max out of order");
                s.components.push_back(Component::boxed(lo, hi));
            }
        if (s.components.empty())
            throw std::invalid_argument("pattern json: generator with no components");
        if (g.contains("anchor")) {
            s.anchor = parse_vec(g["anchor"], "anchor");
        } else if (s.components.front().kind == Component::Kind::Segment) {
            s.anchor = s.components.front().seg.a;
        } else {
            s.anchor = s.components.front().box.min;
        }
        spec.generators.push_back(std::move(s));
    }
    if (j.contains("lattice") && !j["lattice"].is_null()) {
        require_keys(j["lattice"], {"vectors"}, "lattice");
        const json& vecs = j["lattice"].at("vectors");
        if (vecs.size() != 2) throw std::invalid_argument("pattern json: lattice needs 2 vectors");
        spec.lattice = Lattice{parse_vec(vecs[0], "lattice"), parse_vec(vecs[1], "lattice")};
    }
    validate_pattern(spec);
    return spec;
}

PatternSpec load_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pattern file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_pattern_json(ss.str());
}

std::string pattern_to_json(const PatternSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["dimension"] = spec.dimension;
    j["generators"] = json::array();
    for (const Stitch& s : spec.generators) {
        json g;
        g["id"] = s.id;
        g["anchor"] = {s.anchor.x, s.anchor.y};
        json segs = json::array(), boxes = json::array();
        for (const Component& c : s.components) {
            if (c.kind == Component::Kind::Segment)
                segs.push_back({{c.seg.a.x, c.seg.a.y}, {c.seg.b.x, c.seg.b.y}});
            else
                boxes.push_back({{c.box.min.x, c.box.min.y}, {c.box.max.x, c.box.max.y}});
        }
        if (!segs.empty()) g["segments"] = segs;
        if (!boxes.empty()) g["boxes"] = boxes;
        j["generators"].push_back(g);
    }
    if (spec.lattice)
        j["lattice"] = {{"vectors",
                         {{spec.lattice->v1.x, spec.lattice->v1.y},
                          {spec.lattice->v2.x, spec.lattice->v2.y}}}};
    else
        j["lattice"] = nullptr;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Validation

void validate_pattern(const PatternSpec& spec) {
    if (spec.generators.empty()) throw std::invalid_argument("pattern: no generators");
    if (spec.lattice) {
        const double det = spec.lattice->v1.cross(spec.lattice->v2);
        if (std::fabs(det) < 1e-12)
            throw std::invalid_argument("pattern: degenerate lattice (parallel vectors)");
    }
    for (const Stitch& s : spec.generators) {
        // Connectivity: components must form one connected set (touching counts).
        const size_t n = s.components.size();
        std::vector<char> seen(n, 0);
        std::deque<size_t> q{0};
        seen[0] = 1;
        while (!q.empty()) {
            size_t i = q.front();
            q.pop_front();
            for (size_t k = 0; k < n; ++k) {
                if (seen[k]) continue;
                if (closest_pair(s.components[i], s.components[k]).d <= 1e-12) {
                    seen[k] = 1;
                    q.push_back(k);
                }
            }
        }
        if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n))
            throw std::invalid_argument("pattern: stitch '" + s.id + "' is not connected");
        if (!s.contains(s.anchor, 1e-9))
            throw std::invalid_argument("pattern: anchor of '" + s.id + "' not on the stitch");
    }
    const double sep = separation(spec);
    if (!(sep > 0.0))
        throw std::invalid_argument("pattern: stitches overlap (separation factor must be > 0)");
}

// ---------------------------------------------------------------------------
// Materialization

std::vector<Stitch> instantiate(const PatternSpec& spec, const AxisBox& window) {
    if (window.empty()) throw std::invalid_argument("instantiate: empty window");
    std::vector<Stitch> out;
    auto intersects_window = [&](const Stitch& s) {
        Component wbox = Component::boxed(window.min, window.max);
        for (const Component& c : s.components)
            if (closest_pair(c, wbox).d <= 1e-9) return true;
        return false;
    };
    if (!spec.lattice) {
        for (const Stitch& g : spec.generators)
            if (intersects_window(g)) out.push_back(g);
        return out;
    }
    const Vec2 v1 = spec.lattice->v1, v2 = spec.lattice->v2;
    const double det = v1.cross(v2);
    if (std::fabs(det) < 1e-12)
        throw std::invalid_argument("instantiate: degenerate lattice (parallel vectors)");
    for (size_t gi = 0; gi < spec.generators.size(); ++gi) {
        const Stitch& g = spec.generators[gi];
        const AxisBox gb = g.bounds();
        // Translate t = i v1 + j v2 must lie in window ⊖ generator bounds.
        const AxisBox tb{{window.min.x - gb.max.x, window.min.y - gb.max.y},
                         {window.max.x - gb.min.x, window.max.y - gb.min.y}};
        double ilo = kInf, ihi = -kInf, jlo = kInf, jhi = -kInf;
        for (Vec2 corner : {tb.min, Vec2{tb.max.x, tb.min.y}, tb.max, Vec2{tb.min.x, tb.max.y}}) {
            // (i, j) = M^{-1} corner with M = [v1 v2].
            const double ci = (corner.x * v2.y - corner.y * v2.x) / det;
            const double cj = (v1.x * corner.y - v1.y * corner.x) / det;
            ilo = std::fmin(ilo, ci);
            ihi = std::fmax(ihi, ci);
            jlo = std::fmin(jlo, cj);
            jhi = std::fmax(jhi, cj);
        }
        const long i0 = static_cast<long>(std::floor(ilo - 1e-9)) - 1;
        const long i1 = static_cast<long>(std::ceil(ihi + 1e-9)) + 1;
        const long j0 = static_cast<long>(std::floor(jlo - 1e-9)) - 1;
        const long j1 = static_cast<long>(std::ceil(jhi + 1e-9)) + 1;
        for (long i = i0; i <= i1; ++i) {
            for (long j = j0; j <= j1; ++j) {
                const Vec2 t = v1 * static_cast<double>(i) + v2 * static_cast<double>(j);
                Stitch s;
                s.id = g.id + "@" + std::to_string(i) + "," + std::to_string(j);
                s.anchor = g.anchor + t;
                s.components.reserve(g.components.size());
                for (const Component& c : g.components) s.components.push_back(c.translated(t));
                if (intersects_window(s)) out.push_back(std::move(s));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Invariants

double separation(const PatternSpec& spec) {
    std::vector<Stitch> stitches;
    if (!spec.lattice) {
        stitches = spec.generators;
        if (stitches.size() < 2) return kInf;
    } else {
        // Generators vs. all translates within twice the generator extent
        // plus the longest lattice vector; farther translates are farther.
        double extent = 0.0;
        for (const Stitch& g : spec.generators) {
            for (const Component& c : g.components)
                for (Vec2 p : c.extreme_points()) extent = std::fmax(extent, p.norm());
        }
        const Vec2 v1 = spec.lattice->v1, v2 = spec.lattice->v2;
        double vmax = std::fmax(v1.norm(), v2.norm());
        const double radius = 2.0 * extent + 2.0 * vmax + 1.0;
        const AxisBox win{{-radius, -radius}, {radius, radius}};
        stitches = instantiate(spec, win);
    }
    double best = kInf;
    for (size_t i = 0; i < stitches.size(); ++i)
        for (size_t j = i + 1; j < stitches.size(); ++j)
            best = std::fmin(best, dist_components(stitches[i].components, stitches[j].components).d);
    return best;
}

std::pair<double, double> lengths(const PatternSpec& spec) {
    double lmin = kInf, lmax = 0.0;
    for (const Stitch& g : spec.generators) {
        const double d = g.diameter();
        lmin = std::fmin(lmin, d);
        lmax = std::fmax(lmax, d);
    }
    return {lmin, lmax};
}

double distance_to_pattern(Vec2 p, const std::vector<Stitch>& stitches) {
    double best = kInf;
    for (const Stitch& s : stitches) best = std::fmin(best, dist_point_components(p, s.components).d);
    return best;
}

namespace {

struct DepthContext {
    AxisBox domain;
    std::vector<Stitch> stitches;
};

DepthContext depth_context(const PatternSpec& spec, const std::optional<AxisBox>& finite_window) {
    DepthContext ctx;
    if (spec.lattice) {
        ctx.domain = spec.fundamental_domain();
        const double pad = std::hypot(ctx.domain.width(), ctx.domain.height()) +
                           spec.max_generator_diameter() + 1.0;
        const AxisBox padded{{ctx.domain.min.x - pad, ctx.domain.min.y - pad},
                             {ctx.domain.max.x + pad, ctx.domain.max.y + pad}};
        ctx.stitches = instantiate(spec, padded);
    } else {
        if (!finite_window)
            throw std::invalid_argument(
                "depth: finite pattern requires an explicit search window (h may be infinite)");
        ctx.domain = *finite_window;
        ctx.stitches = spec.generators;
    }
    return ctx;
}

}  // namespace

BracketedLength depth(const PatternSpec& spec, double tol,
                      const std::optional<AxisBox>& finite_window) {
    if (!(tol > 0.0)) throw std::invalid_argument("depth: tol must be positive");
    DepthContext ctx = depth_context(spec, finite_window);

    struct Cell {
        Vec2 center;
        double half;  // half side length
        double value; // D(center)
    };
    const double side = std::fmax(ctx.domain.width(), ctx.domain.height());
    std::vector<Cell> active;
    // Initial grid 16x16 over a square covering the domain.
    const int n0 = 16;
    const double c0 = side / n0;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n0; ++j) {
            Vec2 c{ctx.domain.min.x + (i + 0.5) * c0, ctx.domain.min.y + (j + 0.5) * c0};
            if (c.x > ctx.domain.max.x + c0 || c.y > ctx.domain.max.y + c0) continue;
            active.push_back({c, c0 / 2.0, distance_to_pattern(c, ctx.stitches)});
        }
    double lo = 0.0;
    for (const Cell& c : active) lo = std::fmax(lo, c.value);
    // D is 1-Lipschitz: a cell of half-diagonal r can exceed its center
    // value by at most r*sqrt(2)... the half-diagonal itself.
    auto slack = [](const Cell& c) { return c.half * std::sqrt(2.0); };
    double hi = 0.0;
    for (const Cell& c : active) hi = std::fmax(hi, c.value + slack(c));
    while (hi - lo > tol) {
        std::vector<Cell> next;
        next.reserve(active.size() * 2);
        for (const Cell& c : active) {
            if (c.value + slack(c) <= lo) continue;  // cannot contain the sup
            const double h2 = c.half / 2.0;
            for (int dx : {-1, 1})
                for (int dy : {-1, 1}) {
                    Vec2 cc{c.center.x + dx * h2, c.center.y + dy * h2};
                    Cell child{cc, h2, distance_to_pattern(cc, ctx.stitches)};
                    lo = std::fmax(lo, child.value);
                    next.push_back(child);
                }
        }
        active = std::move(next);
        hi = 0.0;
        for (const Cell& c : active) hi = std::fmax(hi, c.value + slack(c));
        hi = std::fmax(hi, lo);
        if (active.empty()) break;
    }
    return {lo, std::fmax(hi, lo)};
}

BracketedLength tube_area_bracket(const std::vector<Stitch>& stitches, double eps,
                                  const AxisBox& window, int grid) {
    if (!(eps > 0.0)) throw std::invalid_argument("tube_area_bracket: eps must be positive");
    if (grid < 16) throw std::invalid_argument("tube_area_bracket: grid too small");
    const double cx = window.width() / grid, cy = window.height() / grid;
    const double cell_area = cx * cy;
    double lo = 0.0, hi = 0.0;
    // Prefilter components near each cell row to keep this O(cells * nearby).
    std::vector<const Component*> comps;
    for (const Stitch& s : stitches)
        for (const Component& c : s.components) comps.push_back(&c);
    for (int i = 0; i < grid; ++i) {
        const double x0 = window.min.x + i * cx;
        for (int j = 0; j < grid; ++j) {
            const double y0 = window.min.y + j * cy;
            const AxisBox cell{{x0, y0}, {x0 + cx, y0 + cy}};
            bool inside = false;
            double mind = kInf;
            for (const Component* c : comps) {
                // Distance to a convex component is convex, so its max over
                // the cell is attained at a corner: exact containment test.
                if (max_dist_box_component(cell, *c) <= eps) {
                    inside = true;
                    break;
                }
                mind = std::fmin(mind, min_dist_box_component(cell, *c));
            }
            if (inside) {
                lo += cell_area;
                hi += cell_area;
            } else if (mind < eps) {
                hi += cell_area;
            }
        }
    }
    return {lo, hi};
}

NicenessReport niceness_report(const PatternSpec& spec, const AxisBox& window,
                               const std::vector<double>& eps_schedule,
                               double threshold, int grid) {
    if (eps_schedule.empty())
        throw std::invalid_argument("niceness_report: empty eps schedule");
    for (size_t i = 1; i < eps_schedule.size(); ++i)
        if (!(eps_schedule[i] < eps_schedule[i - 1]) || !(eps_schedule[i] > 0.0))
            throw std::invalid_argument("niceness_report: schedule must be strictly decreasing and positive");
    const double pad = eps_schedule.front() + 1.0;
    const AxisBox padded{{window.min.x - pad, window.min.y - pad},
                         {window.max.x + pad, window.max.y + pad}};
    const std::vector<Stitch> stitches = instantiate(spec, padded);
    NicenessReport rep;
    rep.eps = eps_schedule;
    for (double e : eps_schedule) rep.volumes.push_back(tube_area_bracket(stitches, e, window, grid));
    const BracketedLength last = rep.volumes.back();
    if (last.hi < threshold) {
        rep.verdict = NicenessVerdict::Nice;
    } else if (last.lo > threshold) {
        // "Stabilized" means the lower brackets stopped shrinking appreciably.
        const double prev = rep.volumes.size() > 1 ? rep.volumes[rep.volumes.size() - 2].lo : last.lo;
        rep.verdict = (prev - last.lo) < 0.1 * last.lo ? NicenessVerdict::NotNice
                                                       : NicenessVerdict::Inconclusive;
    } else {
        rep.verdict = NicenessVerdict::Inconclusive;
    }
    return rep;
}

CoverRadiusResult cover_radius_check(const PatternSpec& spec, const BracketedLength& depth_bracket,
                                     int samples, std::uint64_t seed,
                                     const std::optional<AxisBox>& finite_window) {
    DepthContext ctx = depth_context(spec, finite_window);
    const double bound = depth_bracket.hi + lengths(spec).second;
    CoverRadiusResult res;
    res.ok = true;
    for (int i = 0; i < samples; ++i) {
        const Vec2 p = uniform_in_box(seed, static_cast<std::uint64_t>(i), ctx.domain);
        const double d = distance_to_pattern(p, ctx.stitches);
        if (d > res.worst_distance) {
            res.worst_distance = d;
            res.worst_point = p;
        }
        if (d > bound + 1e-9) res.ok = false;
    }
    return res;
}

PatternInvariants pattern_invariants(const PatternSpec& spec, double depth_tol,
                                     const std::optional<AxisBox>& finite_window) {
    PatternInvariants inv;
    inv.separation = separation(spec);
    inv.depth = depth(spec, depth_tol, finite_window);
    std::tie(inv.length_min, inv.length_max) = lengths(spec);
    inv.cover_radius_ok = cover_radius_check(spec, inv.depth, 2000, 7, finite_window).ok;
    return inv;
}

}  // namespace smock
