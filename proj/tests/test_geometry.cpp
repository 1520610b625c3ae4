#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "smock/geometry.hpp"
#include "smock/rng.hpp"

using namespace smock;

TEST_CASE("dist_point_segment frozen values") {
    Segment s{{0, 0}, {1, 0}};
    CHECK(dist_point_segment({0.5, 1.0}, s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist_point_segment({2.0, 0.0}, s) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist_point_segment({-3.0, 4.0}, s) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(dist_point_segment({0.25, 0.0}, s) == doctest::Approx(0.0));
}

TEST_CASE("dist_point_box frozen values") {
    AxisBox b{{0, 0}, {1, 1}};
    CHECK(dist_point_box({0.5, 0.5}, b) == 0.0);
    CHECK(dist_point_box({2.0, 0.5}, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist_point_box({2.0, 2.0}, b) == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
}

TEST_CASE("dist_components frozen values") {
    std::vector<Component> a{Component::segment({0, 0}, {1, 0})};
    std::vector<Component> b{Component::segment({3, 0}, {4, 0})};
    std::vector<Component> c{Component::segment({0, 1}, {1, 1})};
    auto ab = dist_components(a, b);
    CHECK(ab.d == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dist_components(a, c).d == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist_components(a, a).d == doctest::Approx(0.0));
    // symmetry and witness consistency
    auto ba = dist_components(b, a);
    CHECK(ba.d == doctest::Approx(ab.d).epsilon(1e-14));
    CHECK(dist(ab.on_a, ab.on_b) == doctest::Approx(ab.d).epsilon(1e-12));
}

TEST_CASE("closest_pair box box") {
    AxisBox a{{0, 0}, {1, 1}};
    AxisBox b{{2, 3}, {4, 5}};
    auto cp = closest_pair(a, b);
    CHECK(cp.d == doctest::Approx(std::hypot(1.0, 2.0)).epsilon(1e-12));
    CHECK(a.contains(cp.on_a));
    CHECK(b.contains(cp.on_b));
}

TEST_CASE("box component min max distance bracket random") {
    for (int t = 0; t < 200; ++t) {
        AxisBox cell{uniform_in_box(7, t, AxisBox{{-3, -3}, {3, 3}}, 0), {}};
        cell.max = cell.min + Vec2{0.3, 0.3};
        Component c = Component::segment(uniform_in_box(7, t, AxisBox{{-3, -3}, {3, 3}}, 1),
                                         uniform_in_box(7, t, AxisBox{{-3, -3}, {3, 3}}, 2));
        double lo = min_dist_box_component(cell, c);
        double hi = max_dist_box_component(cell, c);
        CHECK(lo <= hi + 1e-12);
        // any sampled point of the cell has distance within [lo, hi]
        Vec2 p = cell.clamp(uniform_in_box(8, t, cell, 0));
        double d = dist_point_segment(p, c.seg);
        CHECK(d >= lo - 1e-9);
        CHECK(d <= hi + 1e-9);
    }
}

TEST_CASE("unit ball volumes") {
    CHECK(unit_ball_volume(0) == doctest::Approx(2.0));
    CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
    CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-14));
}

TEST_CASE("tube volume formula") {
    CHECK(tube_volume(1.0, 0.1, 2) ==
          doctest::Approx(std::numbers::pi * 0.01 + 0.2).epsilon(1e-12));
    CHECK(tube_volume(0.0, 0.5, 2) ==
          doctest::Approx(std::numbers::pi * 0.25).epsilon(1e-12));
    CHECK_THROWS_AS(tube_volume(1.0, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(tube_volume(1.0, -0.1, 2), std::invalid_argument);
    CHECK_THROWS_AS(tube_volume(1.0, 0.1, 4), std::invalid_argument);
    // monotone in both arguments
    CHECK(tube_volume(1.0, 0.2, 2) > tube_volume(1.0, 0.1, 2));
    CHECK(tube_volume(2.0, 0.1, 2) > tube_volume(1.0, 0.1, 2));
}
