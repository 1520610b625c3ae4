#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "smock/pattern.hpp"

using namespace smock;

TEST_CASE("shipped patterns load and validate") {
    for (const char* name : {"lattice_2x1", "point_lattice", "two_segments", "box_stitch",
                             "x_plus", "x_T", "x_square"}) {
        auto spec = load_pattern(name);
        CHECK_NOTHROW(validate_pattern(spec));
        CHECK(spec.dimension == 2);
    }
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS(load_pattern_json(R"({"name":"x","dimension":2,"generators":[],"lattice":null,"extra":1})"));
    CHECK_THROWS(load_pattern_json(R"({"name":"x","dimension":2,"generators":[
        {"id":"a","anchor":[0,0],"segments":[[[0,0],[1,0]]],"color":"red"}],"lattice":null})"));
    CHECK_THROWS(load_pattern_json(R"({"name":"x","dimension":2,"generators":[
        {"id":"a","anchor":[0,0],"segments":[[[0,0],[1,0]]]}],
        "lattice":{"vectors":[[1,0],[0,1]],"shear":0}})"));
}

TEST_CASE("json round trip") {
    auto spec = load_pattern("lattice_2x1");
    auto back = load_pattern_json(pattern_to_json(spec));
    CHECK(back.name == spec.name);
    REQUIRE(back.generators.size() == spec.generators.size());
    CHECK(back.generators[0].id == spec.generators[0].id);
    REQUIRE(back.lattice.has_value());
    CHECK(back.lattice->v1 == spec.lattice->v1);
    CHECK(back.lattice->v2 == spec.lattice->v2);
}

TEST_CASE("instantiate lattice_2x1 in a window") {
    auto spec = load_pattern("lattice_2x1");
    auto stitches = instantiate(spec, AxisBox{{0, 0}, {4, 2}});
    // left endpoints (2i, j), i in {0,1,2}, j in {0,1,2}; x = 4 touches the
    // closed window boundary and counts.
    CHECK(stitches.size() == 9);
    // deterministic ids and order
    auto again = instantiate(spec, AxisBox{{0, 0}, {4, 2}});
    REQUIRE(again.size() == stitches.size());
    for (std::size_t k = 0; k < stitches.size(); ++k) CHECK(again[k].id == stitches[k].id);
    for (const auto& s : stitches) {
        REQUIRE(s.components.size() == 1);
        CHECK(s.components[0].seg.length() == doctest::Approx(1.0));
        CHECK(s.contains(s.anchor));
    }
}

TEST_CASE("separation frozen values") {
    CHECK(separation(load_pattern("lattice_2x1")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(separation(load_pattern("two_segments")) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(separation(load_pattern("point_lattice")) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(separation(load_pattern("box_stitch")) == std::numeric_limits<double>::infinity());
}

TEST_CASE("lengths frozen values") {
    auto l1 = lengths(load_pattern("lattice_2x1"));
    CHECK(l1.first == doctest::Approx(1.0));
    CHECK(l1.second == doctest::Approx(1.0));
    auto l2 = lengths(load_pattern("point_lattice"));
    CHECK(l2.first == doctest::Approx(0.0));
    CHECK(l2.second == doctest::Approx(0.0));
}

TEST_CASE("depth brackets") {
    const double h = std::numbers::sqrt2 / 2.0;
    for (const char* name : {"lattice_2x1", "point_lattice"}) {
        auto b = depth(load_pattern(name), 1e-4);
        CHECK(b.lo <= h + 1e-12);
        CHECK(b.hi >= h - 1e-12);
        CHECK(b.hi - b.lo <= 1e-4 + 1e-12);
    }
    // finite pattern whose stitch fills the window: depth 0
    auto box = load_pattern("box_stitch");
    auto b = depth(box, 1e-4, AxisBox{{0, 0}, {1, 1}});
    CHECK(b.hi <= 1e-4 + 1e-12);
}

TEST_CASE("depth is periodic") {
    auto spec = load_pattern("lattice_2x1");
    auto st = instantiate(spec, AxisBox{{-6, -6}, {10, 10}});
    for (double x : {0.3, 1.1, 1.7}) {
        for (double y : {0.2, 0.5}) {
            double d0 = distance_to_pattern({x, y}, st);
            double d1 = distance_to_pattern({x + 2.0, y + 1.0}, st);
            CHECK(d1 == doctest::Approx(d0).epsilon(1e-9));
        }
    }
}

TEST_CASE("tube area bracket contains the true tube area") {
    // single unit segment, tube area pi eps^2 + 2 eps L
    std::vector<Stitch> st{{"s", {Component::segment({0, 0}, {1, 0})}, {0, 0}}};
    for (double eps : {0.1, 0.2}) {
        auto b = tube_area_bracket(st, eps, AxisBox{{-1, -1}, {2, 2}}, 256);
        double truth = std::numbers::pi * eps * eps + 2.0 * eps;
        CHECK(b.lo <= truth);
        CHECK(b.hi >= truth);
        CHECK(b.hi - b.lo < 0.25 * truth);
    }
    // refinement nests
    auto coarse = tube_area_bracket(st, 0.1, AxisBox{{-1, -1}, {2, 2}}, 64);
    auto fine = tube_area_bracket(st, 0.1, AxisBox{{-1, -1}, {2, 2}}, 256);
    CHECK(fine.lo >= coarse.lo - 1e-12);
    CHECK(fine.hi <= coarse.hi + 1e-12);
}

TEST_CASE("niceness verdicts") {
    auto nice = niceness_report(load_pattern("lattice_2x1"), AxisBox{{0, 0}, {4, 4}},
                                {0.2, 0.1, 0.05, 0.01, 0.005}, 0.2, 512);
    CHECK(nice.verdict == NicenessVerdict::Nice);
    for (std::size_t k = 1; k < nice.volumes.size(); ++k)
        CHECK(nice.volumes[k].hi < nice.volumes[k - 1].hi);
    auto bad = niceness_report(load_pattern("box_stitch"), AxisBox{{-0.5, -0.5}, {1.5, 1.5}},
                               {0.2, 0.1, 0.05, 0.01, 0.005}, 0.2, 512);
    CHECK(bad.verdict == NicenessVerdict::NotNice);
    // the box keeps a full unit of area at every eps
    CHECK(bad.volumes.back().lo > 1.0 - 1e-6);
}

TEST_CASE("cover radius check") {
    auto spec = load_pattern("lattice_2x1");
    auto b = depth(spec, 1e-3);
    auto r = cover_radius_check(spec, b, 2000, 11);
    CHECK(r.ok);
    CHECK(r.worst_distance <= b.hi + 1e-9);
}

TEST_CASE("pattern invariants bundle") {
    auto inv = pattern_invariants(load_pattern("lattice_2x1"));
    CHECK(inv.separation == doctest::Approx(1.0));
    CHECK(inv.depth.lo <= std::numbers::sqrt2 / 2.0 + 1e-9);
    CHECK(inv.depth.hi >= std::numbers::sqrt2 / 2.0 - 1e-9);
    CHECK(inv.length_min == doctest::Approx(1.0));
    CHECK(inv.length_max == doctest::Approx(1.0));
    CHECK(inv.cover_radius_ok);
}

TEST_CASE("validation rejects broken specs") {
    // anchor off the stitch
    PatternSpec s;
    s.name = "bad";
    s.generators.push_back({"a", {Component::segment({0, 0}, {1, 0})}, {5, 5}});
    CHECK_THROWS_AS(validate_pattern(s), std::invalid_argument);
    // degenerate lattice
    PatternSpec t;
    t.name = "bad2";
    t.generators.push_back({"a", {Component::segment({0, 0}, {0.1, 0})}, {0, 0}});
    t.lattice = Lattice{{1, 0}, {2, 0}};
    CHECK_THROWS_AS(validate_pattern(t), std::invalid_argument);
    // overlapping stitches: zero separation
    PatternSpec u;
    u.name = "bad3";
    u.generators.push_back({"a", {Component::segment({0, 0}, {1, 0})}, {0, 0}});
    u.generators.push_back({"b", {Component::segment({1, 0}, {2, 0})}, {1, 0}});
    CHECK_THROWS_AS(validate_pattern(u), std::invalid_argument);
}
