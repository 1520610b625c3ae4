#include "smock/raster.hpp"

#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "smock/parallel.hpp"

namespace smock {

namespace {

constexpr double kHalfDiag = 0.70710678118654752440;  // sqrt(2)/2

void check_square(const AxisBox& window) {
    double w = window.max.x - window.min.x;
    double h = window.max.y - window.min.y;
    if (!(w > 0) || std::fabs(w - h) > 1e-12 * std::fmax(1.0, w))
        throw std::invalid_argument("raster window must be square and nondegenerate");
}

CellClass classify_value(double val, double r, double c) {
    const double m = c * kHalfDiag;
    if (val <= r - m) return CellClass::Inside;
    if (val >= r + m) return CellClass::Outside;
    return CellClass::Boundary;
}

// Membership of a whole cell in the value band [a, b): certain / possible
// given the center value of a 1-Lipschitz field.
struct BandTest {
    bool sure;
    bool possible;
};

BandTest in_band(double val, double a, double b, double m) {
    BandTest t;
    t.sure = (val >= a + m) && (val <= b - m);
    t.possible = (val > a - m) && (val < b + m);
    return t;
}

bool touches_edge(int i, int j, int n) { return i == 0 || j == 0 || i == n - 1 || j == n - 1; }

}  // namespace

double BallRaster::cell_side() const {
    return (window.max.x - window.min.x) / cells_per_side;
}

Vec2 BallRaster::cell_center(int i, int j) const {
    const double c = cell_side();
    return {window.min.x + (i + 0.5) * c, window.min.y + (j + 0.5) * c};
}

CellClass BallRaster::classify(int i, int j, double r) const {
    return classify_value(values[static_cast<std::size_t>(j) * cells_per_side + i], r, cell_side());
}

BallRaster rasterize_rho(const PatternSpec& spec, Vec2 x0, const AxisBox& window, int n) {
    if (n < 16) throw std::invalid_argument("rasterize_rho needs n >= 16");
    check_square(window);
    BallRaster r;
    r.x0 = x0;
    r.window = window;
    r.cells_per_side = n;
    r.values.assign(static_cast<std::size_t>(n) * n, 0.0);

    Smocked sm(spec);
    // Every stitch on a shortest path from x0 to a point of the window
    // lies in the corridor the field implementation pads for, so the
    // field is exact on the whole window.
    AxisBox hull{{std::fmin(window.min.x, x0.x), std::fmin(window.min.y, x0.y)},
                 {std::fmax(window.max.x, x0.x), std::fmax(window.max.y, x0.y)}};
    Smocked::SourceField field = sm.source_field(x0, hull);
    parallel_for(r.values.size(), [&](std::size_t idx) {
        int i = static_cast<int>(idx) % n;
        int j = static_cast<int>(idx) / n;
        r.values[idx] = Smocked::field_value(field, r.cell_center(i, j));
    });
    return r;
}

VolumeBracket ball_volume(const BallRaster& raster, double r) {
    if (!(r > 0)) throw std::invalid_argument("ball_volume needs r > 0");
    const int n = raster.cells_per_side;
    const double c = raster.cell_side();
    VolumeBracket out;
    out.cell_side = c;
    std::size_t inside = 0, boundary = 0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            CellClass cls = raster.classify(i, j, r);
            if (cls == CellClass::Inside) ++inside;
            if (cls == CellClass::Boundary) {
                ++boundary;
                if (touches_edge(i, j, n)) out.edge_warning = true;
            }
        }
    out.lo = static_cast<double>(inside) * c * c;
    out.hi = static_cast<double>(inside + boundary) * c * c;
    return out;
}

ChartDecomposition chart_decomposition_volumes(const BallRaster& raster, const PatternSpec& spec,
                                               double R, int k_max) {
    if (k_max < 1) throw std::invalid_argument("chart_decomposition_volumes needs k_max >= 1");
    const int n = raster.cells_per_side;
    const double c = raster.cell_side();
    const double m = c * kHalfDiag;
    const double inf = std::numeric_limits<double>::infinity();

    AxisBox padded{{raster.window.min.x - 1.0 - c, raster.window.min.y - 1.0 - c},
                   {raster.window.max.x + 1.0 + c, raster.window.max.y + 1.0 + c}};
    std::vector<Stitch> stitches = instantiate(spec, padded);

    std::vector<double> dvals(raster.values.size());
    parallel_for(dvals.size(), [&](std::size_t idx) {
        int i = static_cast<int>(idx) % n;
        int j = static_cast<int>(idx) / n;
        dvals[idx] = distance_to_pattern(raster.cell_center(i, j), stitches);
    });

    ChartDecomposition out;
    out.parts.assign(static_cast<std::size_t>(k_max) + 1, VolumeBracket{0, 0, c, false});
    out.tail = VolumeBracket{0, 0, c, false};
    for (std::size_t idx = 0; idx < raster.values.size(); ++idx) {
        BandTest inU = in_band(raster.values[idx], 0.0, R, m);
        inU.sure = raster.values[idx] <= R - m;  // rho >= 0 always
        double D = dvals[idx];
        for (int k = 0; k <= k_max; ++k) {
            double a = (k == 0) ? 1.0 : 1.0 / (k + 1);
            double b = (k == 0) ? inf : 1.0 / k;
            BandTest ann = in_band(D, a, b, m);
            if (k == 0) ann.sure = D >= 1.0 + m;
            if (inU.sure && ann.sure) out.parts[static_cast<std::size_t>(k)].lo += c * c;
            if (inU.possible && ann.possible) out.parts[static_cast<std::size_t>(k)].hi += c * c;
        }
        BandTest tail = in_band(D, -inf, 1.0 / (k_max + 1), m);
        tail.sure = D <= 1.0 / (k_max + 1) - m;
        if (inU.sure && tail.sure) out.tail.lo += c * c;
        if (inU.possible && tail.possible) out.tail.hi += c * c;
    }
    return out;
}

PerimeterEstimate perimeter_bracket(const BallRaster& raster, double r) {
    const int n = raster.cells_per_side;
    const double c = raster.cell_side();
    PerimeterEstimate out;
    double len = 0.0;

    auto value = [&](int i, int j) {
        return raster.values[static_cast<std::size_t>(j) * n + i];
    };
    // Marching squares on the grid of cell centers.
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i + 1 < n; ++i) {
            double v00 = value(i, j), v10 = value(i + 1, j);
            double v11 = value(i + 1, j + 1), v01 = value(i, j + 1);
            bool b0 = v00 <= r, b1 = v10 <= r, b2 = v11 <= r, b3 = v01 <= r;
            int code = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
            if (code == 0 || code == 15) continue;
            if (touches_edge(i, j, n) || touches_edge(i + 1, j + 1, n)) out.edge_warning = true;

            Vec2 p00 = raster.cell_center(i, j);
            auto interp = [&](Vec2 a, Vec2 b, double va, double vb) {
                double t = (r - va) / (vb - va);
                return a + (b - a) * t;
            };
            Vec2 e_bottom = interp(p00, p00 + Vec2{c, 0}, v00, v10);
            Vec2 e_right = interp(p00 + Vec2{c, 0}, p00 + Vec2{c, c}, v10, v11);
            Vec2 e_top = interp(p00 + Vec2{c, c}, p00 + Vec2{0, c}, v11, v01);
            Vec2 e_left = interp(p00 + Vec2{0, c}, p00, v01, v00);

            switch (code) {
                case 1: case 14: len += dist(e_left, e_bottom); break;
                case 2: case 13: len += dist(e_bottom, e_right); break;
                case 4: case 11: len += dist(e_right, e_top); break;
                case 8: case 7: len += dist(e_top, e_left); break;
                case 3: case 12: len += dist(e_left, e_right); break;
                case 6: case 9: len += dist(e_bottom, e_top); break;
                case 5: case 10: {
                    // Saddle: break the tie with the center average.
                    double mid = 0.25 * (v00 + v10 + v11 + v01);
                    bool join = (mid <= r) == (code == 5);
                    if (join) {
                        len += dist(e_left, e_top) + dist(e_bottom, e_right);
                    } else {
                        len += dist(e_left, e_bottom) + dist(e_top, e_right);
                    }
                    break;
                }
                default: break;
            }
        }
    out.lo = len;
    out.hi = len * (1.0 + 2.0 * c);
    return out;
}

VolumeBracket tube_raster_volume(const PatternSpec& spec, double eps, const AxisBox& window,
                                 int n) {
    if (!(eps > 0)) throw std::invalid_argument("tube_raster_volume needs eps > 0");
    check_square(window);
    const double c = (window.max.x - window.min.x) / n;
    AxisBox padded{{window.min.x - eps - 2 * c, window.min.y - eps - 2 * c},
                   {window.max.x + eps + 2 * c, window.max.y + eps + 2 * c}};
    BracketedLength b = tube_area_bracket(instantiate(spec, padded), eps, window, n);
    return {b.lo, b.hi, c, false};
}

void svg_export(const BallRaster& raster, const PatternSpec& spec, double r,
                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("svg_export: cannot write " + path);
    const int n = raster.cells_per_side;
    const double c = raster.cell_side();
    const double side = raster.window.max.x - raster.window.min.x;
    const double scale = 800.0 / side;
    auto X = [&](double x) { return (x - raster.window.min.x) * scale; };
    auto Y = [&](double y) { return (raster.window.max.y - y) * scale; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
        << "width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n"
        << "<rect width=\"800\" height=\"800\" fill=\"#ffffff\"/>\n";
    char buf[256];
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            CellClass cls = raster.classify(i, j, r);
            if (cls == CellClass::Outside) continue;
            const char* fill = cls == CellClass::Inside ? "#9ecae1" : "#fdd0a2";
            Vec2 ctr = raster.cell_center(i, j);
            std::snprintf(buf, sizeof buf,
                          "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                          "fill=\"%s\"/>\n",
                          X(ctr.x - 0.5 * c), Y(ctr.y + 0.5 * c), c * scale, c * scale, fill);
            out << buf;
        }
    for (const Stitch& st : instantiate(spec, raster.window)) {
        for (const Component& comp : st.components) {
            if (comp.kind == Component::Kind::Segment) {
                if (comp.seg.length() < 1e-12) {
                    std::snprintf(buf, sizeof buf,
                                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"2\" fill=\"#000000\"/>\n",
                                  X(comp.seg.a.x), Y(comp.seg.a.y));
                } else {
                    std::snprintf(buf, sizeof buf,
                                  "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
                                  "stroke=\"#000000\" stroke-width=\"2\"/>\n",
                                  X(comp.seg.a.x), Y(comp.seg.a.y), X(comp.seg.b.x), Y(comp.seg.b.y));
                }
            } else {
                std::snprintf(buf, sizeof buf,
                              "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                              "fill=\"none\" stroke=\"#000000\" stroke-width=\"2\"/>\n",
                              X(comp.box.min.x), Y(comp.box.max.y), (comp.box.max.x - comp.box.min.x) * scale,
                              (comp.box.max.y - comp.box.min.y) * scale);
            }
        }
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("svg_export: write failed for " + path);
}

void raster_csv(const BallRaster& raster, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("raster_csv: cannot write " + path);
    out << "x,y,rho\n";
    char buf[128];
    const int n = raster.cells_per_side;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            Vec2 p = raster.cell_center(i, j);
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", p.x, p.y,
                          raster.values[static_cast<std::size_t>(j) * n + i]);
            out << buf;
        }
}

}  // namespace smock
