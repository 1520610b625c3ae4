#pragma once

#include <string>
#include <vector>

#include "smock/metric.hpp"
#include "smock/pattern.hpp"

namespace smock {

enum class CellClass { Inside, Outside, Boundary };

// rho_x0 sampled at cell centers of a square grid over a square window.
// Classification against a radius r uses the exact 1-Lipschitz bound:
// a cell is Inside iff rho(center) <= r - c*sqrt(2)/2 (c = cell side),
// Outside iff rho(center) >= r + c*sqrt(2)/2, Boundary otherwise.  An
// Inside cell then lies entirely in U_r, an Outside cell entirely
// outside.
struct BallRaster {
    Vec2 x0;
    AxisBox window;
    int cells_per_side = 0;
    std::vector<double> values;  // row-major, index j * n + i

    double cell_side() const;
    Vec2 cell_center(int i, int j) const;
    CellClass classify(int i, int j, double r) const;
};

struct VolumeBracket {
    double lo = 0.0;
    double hi = 0.0;
    double cell_side = 0.0;
    bool edge_warning = false;  // boundary band touches the window edge
};

struct PerimeterEstimate {
    double lo = 0.0;  // marching-squares contour length
    double hi = 0.0;  // lo * (1 + 2c) curvature slack; evidence, not certified
    bool edge_warning = false;
};

struct ChartDecomposition {
    // parts[k] brackets Vol(A_k), A_0 = U_R \ T_1,
    // A_k = U_R cap (T_{1/k} \ T_{1/(k+1)}) for k >= 1.
    std::vector<VolumeBracket> parts;
    VolumeBracket tail;  // U_R cap T_{1/(k_max+1)}
};

// Deterministic per-cell smocked distances from x0.  n >= 16 and the
// window must be square.
BallRaster rasterize_rho(const PatternSpec& spec, Vec2 x0, const AxisBox& window, int n);

// [Inside area, Inside + Boundary area].  Caller must supply a window
// containing the Euclidean ball B_r(x0); edge_warning is set when the
// boundary band touches the window edge.
VolumeBracket ball_volume(const BallRaster& raster, double r);

ChartDecomposition chart_decomposition_volumes(const BallRaster& raster, const PatternSpec& spec,
                                               double R, int k_max);

PerimeterEstimate perimeter_bracket(const BallRaster& raster, double r);

// Bracketed area of {p in window : D(p) <= eps} on an n x n grid.
VolumeBracket tube_raster_volume(const PatternSpec& spec, double eps, const AxisBox& window, int n);

// Three-fill cell rendering with stitches overdrawn as strokes.
void svg_export(const BallRaster& raster, const PatternSpec& spec, double r,
                const std::string& path);

// CSV dump with header "x,y,rho", one row per cell center.
void raster_csv(const BallRaster& raster, const std::string& path);

}  // namespace smock
