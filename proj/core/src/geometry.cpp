#include "smock/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace smock {

AxisBox Component::bounds() const {
    if (kind == Kind::Segment) {
        return {{std::fmin(seg.a.x, seg.b.x), std::fmin(seg.a.y, seg.b.y)},
                {std::fmax(seg.a.x, seg.b.x), std::fmax(seg.a.y, seg.b.y)}};
    }
    return box;
}

std::vector<Vec2> Component::extreme_points() const {
    if (kind == Kind::Segment) return {seg.a, seg.b};
    return {box.min, {box.max.x, box.min.y}, box.max, {box.min.x, box.max.y}};
}

Component Component::translated(Vec2 t) const {
    Component c = *this;
    if (kind == Kind::Segment) {
        c.seg.a = seg.a + t;
        c.seg.b = seg.b + t;
    } else {
        c.box.min = box.min + t;
        c.box.max = box.max + t;
    }
    return c;
}

Vec2 closest_point_on_segment(Vec2 p, const Segment& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = d.norm2();
    if (len2 == 0.0) return s.a;
    double t = (p - s.a).dot(d) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return s.a + d * t;
}

double dist_point_segment(Vec2 p, const Segment& s) {
    return dist(p, closest_point_on_segment(p, s));
}

double dist_point_box(Vec2 p, const AxisBox& b) {
    return dist(p, b.clamp(p));
}

ClosestPair closest_point_pair(Vec2 p, const Component& c) {
    Vec2 q = c.kind == Component::Kind::Segment ? closest_point_on_segment(p, c.seg)
                                                : c.box.clamp(p);
    return {dist(p, q), p, q};
}

namespace {

bool segments_intersect(const Segment& s, const Segment& t, Vec2* at) {
    const Vec2 r = s.b - s.a;
    const Vec2 q = t.b - t.a;
    const double denom = r.cross(q);
    const Vec2 diff = t.a - s.a;
    if (denom != 0.0) {
        const double u = diff.cross(q) / denom;
        const double v = diff.cross(r) / denom;
        if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0) {
            if (at) *at = s.a + r * u;
            return true;
        }
        return false;
    }
    // Parallel: collinear overlap check.
    if (diff.cross(r) != 0.0) return false;
    const double rlen2 = r.norm2();
    if (rlen2 == 0.0) {
        if (dist(s.a, closest_point_on_segment(s.a, t)) == 0.0) {
            if (at) *at = s.a;
            return true;
        }
        return false;
    }
    double t0 = diff.dot(r) / rlen2;
    double t1 = (t.b - s.a).dot(r) / rlen2;
    if (t0 > t1) std::swap(t0, t1);
    if (t1 < 0.0 || t0 > 1.0) return false;
    if (at) *at = s.a + r * std::clamp(t0, 0.0, 1.0);
    return true;
}

}  // namespace

ClosestPair closest_pair(const Segment& s, const Segment& t) {
    Vec2 at;
    if (segments_intersect(s, t, &at)) return {0.0, at, at};
    ClosestPair best{std::numeric_limits<double>::infinity(), {}, {}};
    auto consider = [&](Vec2 p, Vec2 q, bool flip) {
        const double d = dist(p, q);
        if (d < best.d) best = flip ? ClosestPair{d, q, p} : ClosestPair{d, p, q};
    };
    for (Vec2 p : {s.a, s.b}) consider(p, closest_point_on_segment(p, t), false);
    for (Vec2 p : {t.a, t.b}) consider(closest_point_on_segment(p, s), p, false);
    return best;
}

ClosestPair closest_pair(const Segment& s, const AxisBox& b) {
    if (b.contains(s.a)) return {0.0, s.a, s.a};
    if (b.contains(s.b)) return {0.0, s.b, s.b};
    ClosestPair best{std::numeric_limits<double>::infinity(), {}, {}};
    const Vec2 c0 = b.min, c2 = b.max;
    const Vec2 c1{c2.x, c0.y}, c3{c0.x, c2.y};
    for (const Segment& e : {Segment{c0, c1}, Segment{c1, c2}, Segment{c2, c3}, Segment{c3, c0}}) {
        ClosestPair cp = closest_pair(s, e);
        if (cp.d < best.d) best = cp;
        if (best.d == 0.0) break;
    }
    return best;
}

ClosestPair closest_pair(const AxisBox& a, const AxisBox& b) {
    const double dx = std::fmax(0.0, std::fmax(a.min.x - b.max.x, b.min.x - a.max.x));
    const double dy = std::fmax(0.0, std::fmax(a.min.y - b.max.y, b.min.y - a.max.y));
    // Witness: clamp each box's nearest corner region to the other.
    Vec2 pa{std::clamp(b.min.x, a.min.x, a.max.x), std::clamp(b.min.y, a.min.y, a.max.y)};
    pa = a.clamp(b.clamp(a.center()));
    Vec2 pb = b.clamp(pa);
    pa = a.clamp(pb);
    pb = b.clamp(pa);
    return {std::hypot(dx, dy), pa, pb};
}

ClosestPair closest_pair(const Component& a, const Component& b) {
    using K = Component::Kind;
    if (a.kind == K::Segment && b.kind == K::Segment) return closest_pair(a.seg, b.seg);
    if (a.kind == K::Segment && b.kind == K::Box) return closest_pair(a.seg, b.box);
    if (a.kind == K::Box && b.kind == K::Segment) {
        ClosestPair cp = closest_pair(b.seg, a.box);
        return {cp.d, cp.on_b, cp.on_a};
    }
    return closest_pair(a.box, b.box);
}

ClosestPair dist_components(const std::vector<Component>& a,
                            const std::vector<Component>& b) {
    ClosestPair best{std::numeric_limits<double>::infinity(), {}, {}};
    for (const Component& ca : a) {
        for (const Component& cb : b) {
            ClosestPair cp = closest_pair(ca, cb);
            if (cp.d < best.d) best = cp;
            if (best.d == 0.0) return best;
        }
    }
    return best;
}

ClosestPair dist_point_components(Vec2 p, const std::vector<Component>& comps) {
    ClosestPair best{std::numeric_limits<double>::infinity(), p, p};
    for (const Component& c : comps) {
        ClosestPair cp = closest_point_pair(p, c);
        if (cp.d < best.d) best = cp;
        if (best.d == 0.0) break;
    }
    return best;
}

double max_dist_box_component(const AxisBox& cell, const Component& c) {
    double m = 0.0;
    for (Vec2 corner : {cell.min, Vec2{cell.max.x, cell.min.y}, cell.max,
                        Vec2{cell.min.x, cell.max.y}}) {
        m = std::fmax(m, closest_point_pair(corner, c).d);
    }
    return m;
}

double min_dist_box_component(const AxisBox& cell, const Component& c) {
    Component cellc = Component::boxed(cell.min, cell.max);
    return closest_pair(cellc, c).d;
}

double unit_ball_volume(int n) {
    switch (n) {
        case 0: return 2.0;  // convention used by the tube formula
        case 1: return 2.0;
        case 2: return M_PI;
        case 3: return 4.0 * M_PI / 3.0;
        default: throw std::invalid_argument("unit_ball_volume: dimension out of range");
    }
}

double tube_volume(double length, double eps, int n) {
    if (eps <= 0.0) throw std::invalid_argument("tube_volume: eps must be positive");
    if (length < 0.0) throw std::invalid_argument("tube_volume: negative length");
    if (n < 1 || n > 3) throw std::invalid_argument("tube_volume: dimension out of range");
    return unit_ball_volume(n) * std::pow(eps, n) +
           unit_ball_volume(n - 1) * std::pow(eps, n - 1) * length;
}

}  // namespace smock
