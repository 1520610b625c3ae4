#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "smock/norm.hpp"
#include "smock/rng.hpp"

using namespace smock;

namespace {
const double kSqrt2 = std::numbers::sqrt2;
}

TEST_CASE("euclidean stats") {
    auto s = norm_stats(NormSpec::euclidean());
    CHECK(s.dil == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.lambda == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.kappa == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.alpha == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(s.unit_area == doctest::Approx(std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("f_plus stats frozen") {
    auto s = norm_stats(NormSpec::f_plus());
    CHECK(s.dil == doctest::Approx(kSqrt2 / 3.0).epsilon(1e-12));
    CHECK(s.lambda == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.kappa == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.alpha == doctest::Approx(12.0 * kSqrt2).epsilon(1e-12));
    CHECK(s.unit_area == doctest::Approx(18.0).epsilon(1e-12));
}

TEST_CASE("f_T stats frozen") {
    auto s = norm_stats(NormSpec::f_T());
    CHECK(s.dil == doctest::Approx(kSqrt2 / 2.0).epsilon(1e-12));
    CHECK(s.lambda == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s.alpha == doctest::Approx(8.0 * kSqrt2).epsilon(1e-12));
    CHECK(s.unit_area == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("f_square evaluation and octagon ball") {
    auto F = NormSpec::f_square();
    // F(x) = 2 sqrt2 min(|x1|/3, |x2|/3) + 2 | |x1|/3 - |x2|/3 |
    CHECK(eval(F, {3, 0}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(eval(F, {0, 3}) == doctest::Approx(2.0).epsilon(1e-12));
    double t = 3.0 / (2.0 * kSqrt2);
    CHECK(eval(F, {t, t}) == doctest::Approx(1.0).epsilon(1e-12));
    auto poly = unit_ball_polygon(F, 8);
    REQUIRE(poly.size() == 8);
    for (const auto& v : poly) CHECK(eval(F, v) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(poly[0].x == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(poly[0].y == doctest::Approx(0.0));
}

TEST_CASE("norm axioms sampled") {
    AxisBox box{{-5, -5}, {5, 5}};
    int idx = 0;
    for (auto F : {NormSpec::f_plus(), NormSpec::f_T(), NormSpec::f_square(),
                   NormSpec::euclidean()}) {
        ++idx;
        for (int t = 0; t < 4000; ++t) {
            Vec2 u = uniform_in_box(100 + idx, t, box, 0);
            Vec2 v = uniform_in_box(100 + idx, t, box, 1);
            double fu = eval(F, u), fv = eval(F, v);
            CHECK(eval(F, u + v) <= fu + fv + 1e-9);
            CHECK(eval(F, -u) == doctest::Approx(fu).epsilon(1e-12));
            CHECK(eval(F, u * 2.5) == doctest::Approx(2.5 * fu).epsilon(1e-12));
            CHECK(fu >= 0.0);
        }
        // sandwich against the stats constants
        auto s = norm_stats(F);
        for (int t = 0; t < 500; ++t) {
            Vec2 u = uniform_in_box(200 + idx, t, box, 0);
            CHECK(eval(F, u) <= s.dil * u.norm() + 1e-9);
            CHECK(u.norm() <= s.lambda * eval(F, u) + 1e-9);
        }
    }
}

TEST_CASE("polygon gauge matches closed form") {
    auto F = NormSpec::f_square();
    auto G = NormSpec::polygon(unit_ball_polygon(F, 8));
    CHECK_NOTHROW(validate_norm(G));
    AxisBox box{{-4, -4}, {4, 4}};
    for (int t = 0; t < 500; ++t) {
        Vec2 u = uniform_in_box(301, t, box, 0);
        CHECK(eval(G, u) == doctest::Approx(eval(F, u)).epsilon(1e-9));
    }
    auto sf = norm_stats(F), sg = norm_stats(G);
    CHECK(sg.alpha == doctest::Approx(sf.alpha).epsilon(1e-9));
    CHECK(sg.unit_area == doctest::Approx(sf.unit_area).epsilon(1e-9));
    CHECK(sg.lambda == doctest::Approx(sf.lambda).epsilon(1e-9));
    CHECK(sg.dil == doctest::Approx(sf.dil).epsilon(1e-9));
}

TEST_CASE("polygon validation rejects bad input") {
    // odd vertex count
    CHECK_THROWS_AS(validate_norm(NormSpec::polygon({{1, 0}, {0, 1}, {-1, 0}})),
                    std::invalid_argument);
    // not symmetric
    CHECK_THROWS_AS(validate_norm(NormSpec::polygon({{1, 0}, {0, 1}, {-2, 0}, {0, -1}})),
                    std::invalid_argument);
    // not convex (reflex vertex)
    CHECK_THROWS_AS(validate_norm(NormSpec::polygon(
                        {{2, 0}, {0.1, 0.1}, {0, 2}, {-2, 0}, {-0.1, -0.1}, {0, -2}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(norm_stats(NormSpec::euclidean(), 100), std::invalid_argument);
    CHECK_THROWS_AS(unit_ball_polygon(NormSpec::euclidean(), 4), std::invalid_argument);
}

TEST_CASE("level set scaling") {
    for (auto F : {NormSpec::euclidean(), NormSpec::f_plus(), NormSpec::f_T(),
                   NormSpec::f_square()}) {
        CHECK(level_set_scaling_check(F, 2.0));
        CHECK(level_set_scaling_check(F, 17.5));
    }
}

TEST_CASE("mass bounds frozen for f_plus at R=1") {
    auto m = normed_ball_mass_bounds(NormSpec::f_plus(), 1.0);
    CHECK(m.mass_bound == doctest::Approx(81.0 * std::numbers::pi).epsilon(1e-12));
    CHECK(m.boundary_mass_bound == doctest::Approx(36.0 * kSqrt2).epsilon(1e-12));
    CHECK(m.mass_bound_alt == doctest::Approx(81.0 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("inscribed polygon areas increase with resolution") {
    double prev = 0.0;
    for (int n : {8, 16, 32, 64, 128}) {
        auto poly = unit_ball_polygon(NormSpec::euclidean(), n);
        double area = 0.0;
        for (std::size_t i = 0; i < poly.size(); ++i)
            area += 0.5 * poly[i].cross(poly[(i + 1) % poly.size()]);
        CHECK(area > prev);
        prev = area;
    }
    CHECK(prev < std::numbers::pi);
    CHECK(prev > std::numbers::pi - 1e-2);
}
