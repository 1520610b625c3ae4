#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

namespace smock {

// Planar Euclidean primitives. The library is written for N = 2; the
// dimension constant is carried explicitly where formulas depend on it.
inline constexpr int kDim = 2;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double t) const { return {x * t, y * t}; }
    Vec2 operator/(double t) const { return {x / t, y / t}; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double t, Vec2 v) { return v * t; }
inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Segment {
    Vec2 a;
    Vec2 b;
    double length() const { return dist(a, b); }
};

struct AxisBox {
    Vec2 min;
    Vec2 max;
    bool contains(Vec2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    Vec2 clamp(Vec2 p) const {
        return {std::fmin(std::fmax(p.x, min.x), max.x),
                std::fmin(std::fmax(p.y, min.y), max.y)};
    }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double area() const { return width() * height(); }
    Vec2 center() const { return (min + max) * 0.5; }
    bool empty() const { return max.x < min.x || max.y < min.y; }
};

// One connected component of a stitch: either a segment (possibly
// degenerate, a point) or an axis-aligned box.
struct Component {
    enum class Kind { Segment, Box };
    Kind kind;
    Segment seg{};   // valid when kind == Segment
    AxisBox box{};   // valid when kind == Box

    static Component segment(Vec2 a, Vec2 b) {
        Component c;
        c.kind = Kind::Segment;
        c.seg = {a, b};
        return c;
    }
    static Component boxed(Vec2 lo, Vec2 hi) {
        Component c;
        c.kind = Kind::Box;
        c.box = {lo, hi};
        return c;
    }

    AxisBox bounds() const;
    // Corners / endpoints; the diameter of a union of segments and boxes
    // is attained on these.
    std::vector<Vec2> extreme_points() const;
    Component translated(Vec2 t) const;
};

// A pair of points (p on A, q on B) realizing a set distance.
struct ClosestPair {
    double d = 0.0;
    Vec2 on_a;
    Vec2 on_b;
};

Vec2 closest_point_on_segment(Vec2 p, const Segment& s);
double dist_point_segment(Vec2 p, const Segment& s);
double dist_point_box(Vec2 p, const AxisBox& b);

ClosestPair closest_point_pair(Vec2 p, const Component& c);
ClosestPair closest_pair(const Segment& s, const Segment& t);
ClosestPair closest_pair(const Segment& s, const AxisBox& b);
ClosestPair closest_pair(const AxisBox& a, const AxisBox& b);
ClosestPair closest_pair(const Component& a, const Component& b);

// Exact Euclidean distance between two finite unions of components,
// with witness points.
ClosestPair dist_components(const std::vector<Component>& a,
                            const std::vector<Component>& b);

// Distance from a point to a union of components.
ClosestPair dist_point_components(Vec2 p, const std::vector<Component>& comps);

// Max over a box of the distance to a single component; exact because the
// distance to a convex set is convex, so the max sits on a corner.
double max_dist_box_component(const AxisBox& cell, const Component& c);

// Min over a box of the distance to a component (exact set distance).
double min_dist_box_component(const AxisBox& cell, const Component& c);

// Unit-ball volumes omega_N for the tube formula; omega_0 = 2 by convention.
double unit_ball_volume(int n);

// Volume of the epsilon-tube of a segment of length L in dimension N:
// omega_N eps^N + omega_{N-1} eps^{N-1} L.  Throws std::invalid_argument
// for eps <= 0 or N outside {1,2,3}.
double tube_volume(double length, double eps, int n = kDim);

}  // namespace smock
