#pragma once

#include <vector>

#include "smock/geometry.hpp"

namespace smock {

enum class NormVariant { Euclidean, ScaledL1, FPlus, FT, FSquare, PolygonGauge };

// A planar norm, either one of the closed-form built-ins or the gauge of
// an origin-symmetric convex polygon (used for fitted tangent-cone norms).
struct NormSpec {
    NormVariant variant = NormVariant::Euclidean;
    double divisor = 1.0;        // ScaledL1: (|x1| + |x2|) / divisor
    std::vector<Vec2> vertices;  // PolygonGauge: ccw, origin-symmetric

    static NormSpec euclidean() { return {NormVariant::Euclidean, 1.0, {}}; }
    static NormSpec scaled_l1(double divisor) { return {NormVariant::ScaledL1, divisor, {}}; }
    static NormSpec f_plus() { return {NormVariant::FPlus, 3.0, {}}; }
    static NormSpec f_T() { return {NormVariant::FT, 2.0, {}}; }
    static NormSpec f_square() { return {NormVariant::FSquare, 3.0, {}}; }
    static NormSpec polygon(std::vector<Vec2> verts) {
        return {NormVariant::PolygonGauge, 1.0, std::move(verts)};
    }
};

struct NormStats {
    double dil = 0.0;        // max F(u) over unit vectors
    double lambda = 0.0;     // max |v| / F(v)
    double kappa = 0.0;      // max(dil, lambda)
    double alpha = 0.0;      // perimeter of the unit level set
    double unit_area = 0.0;  // area of the unit ball
};

struct MassBounds {
    double mass_bound = 0.0;           // kappa^{2N} omega_N R^N
    double boundary_mass_bound = 0.0;  // kappa^{N-1} alpha R^{N-1}
    double mass_bound_alt = 0.0;       // kappa^N omega_N (kappa R)^N
};

// Throws std::invalid_argument on malformed specs (gauge polygon not
// convex / not symmetric / origin not strictly interior).
void validate_norm(const NormSpec& F);

double eval(const NormSpec& F, Vec2 v);

// Closed-form constants for the built-ins, exact polygon geometry for
// gauges.  angular_resolution must be >= 360 (kept for interface parity;
// the returned values do not depend on it).
NormStats norm_stats(const NormSpec& F, int angular_resolution = 720);

// Boundary points u_i / F(u_i) for n equally spaced directions.
std::vector<Vec2> unit_ball_polygon(const NormSpec& F, int n);

// Verifies perimeter(F^{-1}(R)) == alpha * R^{N-1} within 1e-9.
bool level_set_scaling_check(const NormSpec& F, double R);

MassBounds normed_ball_mass_bounds(const NormSpec& F, double R);

}  // namespace smock
