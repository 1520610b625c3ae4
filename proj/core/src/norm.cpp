#include "smock/norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace smock {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 dir(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Octagon unit ball of f_square, ccw from the +x axis.
std::vector<Vec2> f_square_vertices() {
    const double a = 1.5;                      // axis vertices (+-3/2, 0), (0, +-3/2)
    const double b = 3.0 / (2.0 * std::sqrt(2.0));  // diagonal vertices
    return {{a, 0}, {b, b}, {0, a}, {-b, b}, {-a, 0}, {-b, -b}, {0, -a}, {b, -b}};
}

double polygon_perimeter(const std::vector<Vec2>& v) {
    double p = 0;
    for (size_t i = 0; i < v.size(); ++i) p += dist(v[i], v[(i + 1) % v.size()]);
    return p;
}

double polygon_area(const std::vector<Vec2>& v) {
    double a = 0;
    for (size_t i = 0; i < v.size(); ++i) a += v[i].cross(v[(i + 1) % v.size()]);
    return 0.5 * a;
}

double dist_origin_segment(Vec2 a, Vec2 b) {
    Vec2 ab = b - a;
    double t = ab.norm2() > 0 ? std::clamp(-a.dot(ab) / ab.norm2(), 0.0, 1.0) : 0.0;
    return (a + ab * t).norm();
}

double gauge_eval(const std::vector<Vec2>& verts, Vec2 v) {
    // Minkowski functional: max over edges of <v, n_i> / <p_i, n_i>,
    // outward normal n_i for a ccw polygon.
    double g = 0;
    for (size_t i = 0; i < verts.size(); ++i) {
        Vec2 a = verts[i], b = verts[(i + 1) % verts.size()];
        Vec2 n{b.y - a.y, a.x - b.x};
        g = std::fmax(g, v.dot(n) / a.dot(n));
    }
    return g;
}

NormStats polygon_stats(const std::vector<Vec2>& verts) {
    NormStats s;
    double rmax = 0, rmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < verts.size(); ++i) {
        rmax = std::fmax(rmax, verts[i].norm());
        rmin = std::fmin(rmin, dist_origin_segment(verts[i], verts[(i + 1) % verts.size()]));
    }
    s.lambda = rmax;      // farthest boundary point from the origin
    s.dil = 1.0 / rmin;   // closest boundary point
    s.kappa = std::fmax(s.dil, s.lambda);
    s.alpha = polygon_perimeter(verts);
    s.unit_area = polygon_area(verts);
    return s;
}

// Diamond |x1| + |x2| <= d has vertices at distance d.
NormStats diamond_stats(double d) {
    NormStats s;
    s.dil = std::sqrt(2.0) / d;
    s.lambda = d;
    s.kappa = std::fmax(s.dil, s.lambda);
    s.alpha = 4.0 * d * std::sqrt(2.0);
    s.unit_area = 2.0 * d * d;
    return s;
}

}  // namespace

void validate_norm(const NormSpec& F) {
    switch (F.variant) {
        case NormVariant::Euclidean:
        case NormVariant::FPlus:
        case NormVariant::FT:
        case NormVariant::FSquare:
            return;
        case NormVariant::ScaledL1:
            if (!(F.divisor > 0) || !std::isfinite(F.divisor))
                throw std::invalid_argument("scaled_l1 divisor must be positive");
            return;
        case NormVariant::PolygonGauge:
            break;
    }
    const auto& v = F.vertices;
    size_t n = v.size();
    if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("gauge polygon needs an even vertex count >= 4");
    for (size_t i = 0; i < n / 2; ++i) {
        Vec2 s = v[i] + v[i + n / 2];
        if (std::fabs(s.x) > 1e-12 || std::fabs(s.y) > 1e-12)
            throw std::invalid_argument("gauge polygon is not origin-symmetric");
    }
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = v[i], b = v[(i + 1) % n], c = v[(i + 2) % n];
        if ((b - a).cross(c - b) <= 1e-12)
            throw std::invalid_argument("gauge polygon is not strictly convex ccw");
        Vec2 nrm{b.y - a.y, a.x - b.x};
        if (a.dot(nrm) <= 1e-12)
            throw std::invalid_argument("gauge polygon does not contain the origin");
    }
}

double eval(const NormSpec& F, Vec2 v) {
    switch (F.variant) {
        case NormVariant::Euclidean:
            return v.norm();
        case NormVariant::ScaledL1:
        case NormVariant::FPlus:
        case NormVariant::FT:
            return (std::fabs(v.x) + std::fabs(v.y)) / F.divisor;
        case NormVariant::FSquare: {
            double a = std::fabs(v.x) / 3.0, b = std::fabs(v.y) / 3.0;
            return 2.0 * std::sqrt(2.0) * std::fmin(a, b) + 2.0 * std::fabs(a - b);
        }
        case NormVariant::PolygonGauge:
            return gauge_eval(F.vertices, v);
    }
    throw std::logic_error("unreachable norm variant");
}

NormStats norm_stats(const NormSpec& F, int angular_resolution) {
    if (angular_resolution < 360)
        throw std::invalid_argument("angular_resolution must be >= 360");
    validate_norm(F);
    switch (F.variant) {
        case NormVariant::Euclidean:
            return {1.0, 1.0, 1.0, 2.0 * kPi, kPi};
        case NormVariant::ScaledL1:
        case NormVariant::FPlus:
        case NormVariant::FT:
            return diamond_stats(F.divisor);
        case NormVariant::FSquare:
            return polygon_stats(f_square_vertices());
        case NormVariant::PolygonGauge:
            return polygon_stats(F.vertices);
    }
    throw std::logic_error("unreachable norm variant");
}

std::vector<Vec2> unit_ball_polygon(const NormSpec& F, int n) {
    if (n < 8) throw std::invalid_argument("unit_ball_polygon needs n >= 8");
    validate_norm(F);
    std::vector<Vec2> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vec2 u = dir(2.0 * kPi * i / n);
        out.push_back(u * (1.0 / eval(F, u)));
    }
    return out;
}

bool level_set_scaling_check(const NormSpec& F, double R) {
    if (!(R > 0)) throw std::invalid_argument("R must be positive");
    NormStats s = norm_stats(F);
    double perim;
    switch (F.variant) {
        case NormVariant::Euclidean:
            perim = 2.0 * kPi * R;
            break;
        case NormVariant::ScaledL1:
        case NormVariant::FPlus:
        case NormVariant::FT:
            perim = 4.0 * std::sqrt(2.0) * F.divisor * R;
            break;
        case NormVariant::FSquare: {
            auto v = f_square_vertices();
            for (auto& p : v) p = p * R;
            perim = polygon_perimeter(v);
            break;
        }
        case NormVariant::PolygonGauge: {
            auto v = F.vertices;
            for (auto& p : v) p = p * R;
            perim = polygon_perimeter(v);
            break;
        }
        default:
            throw std::logic_error("unreachable norm variant");
    }
    return std::fabs(perim - s.alpha * R) <= 1e-9 * std::fmax(1.0, s.alpha * R);
}

MassBounds normed_ball_mass_bounds(const NormSpec& F, double R) {
    if (!(R > 0)) throw std::invalid_argument("R must be positive");
    NormStats s = norm_stats(F);
    const int N = 2;
    const double omega = kPi;  // omega_2
    MassBounds b;
    b.mass_bound = std::pow(s.kappa, 2 * N) * omega * std::pow(R, N);
    b.boundary_mass_bound = std::pow(s.kappa, N - 1) * s.alpha * std::pow(R, N - 1);
    b.mass_bound_alt = std::pow(s.kappa, N) * omega * std::pow(s.kappa * R, N);
    return b;
}

}  // namespace smock
