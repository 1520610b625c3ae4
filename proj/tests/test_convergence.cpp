#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "smock/convergence.hpp"
#include "smock/rng.hpp"

using namespace smock;

TEST_CASE("estimate_K vanishes for the point lattice under the Euclidean norm") {
    auto spec = load_pattern("point_lattice");
    auto k = estimate_K(spec, NormSpec::euclidean(), AxisBox{{-15, -15}, {15, 15}}, 2000, 7);
    CHECK(k.value <= 1e-12);
    CHECK(k.samples == 2000);
}

TEST_CASE("estimate_K is monotone under appending samples") {
    auto spec = load_pattern("lattice_2x1");
    auto F = NormSpec::polygon({{2, 0}, {0, 1}, {-2, 0}, {0, -1}});
    AxisBox box{{-10, -10}, {10, 10}};
    auto a = estimate_K(spec, F, box, 100, 3);
    auto b = estimate_K(spec, F, box, 200, 3);
    CHECK(b.value >= a.value - 1e-15);
    // the witness pair realizes the reported value
    Smocked sm(spec);
    double realized = std::fabs(sm.value(b.witness_a, b.witness_b) -
                                eval(F, b.witness_a - b.witness_b));
    CHECK(realized == doctest::Approx(b.value).epsilon(1e-9));
}

TEST_CASE("estimate_C vanishes for single-stitch and point patterns") {
    CHECK(estimate_C(load_pattern("point_lattice"), NormSpec::euclidean(),
                     AxisBox{{-3, -3}, {3, 3}}) <= 1e-12);
    CHECK(estimate_C(load_pattern("box_stitch"), NormSpec::euclidean(),
                     AxisBox{{-1, -1}, {2, 2}}) <= 1e-12);
}

TEST_CASE("lemma bound arithmetic") {
    CHECK(lemma_2_21_bound(0, 0, 1, 0) == doctest::Approx(0.0));
    CHECK(lemma_2_21_bound(1.0, 0.5, 2.0, 3.0) ==
          doctest::Approx(2.0 + 0.5 + 2.0 * 2.0 * (1.0 + 3.0)).epsilon(1e-12));
}

TEST_CASE("k_report for lattice_2x1") {
    auto spec = load_pattern("lattice_2x1");
    auto F = fit_norm(spec, 1000.0, 64);
    auto rep = k_report(spec, F, AxisBox{{-10, -10}, {10, 10}}, 300, 5);
    CHECK(rep.L == doctest::Approx(1.0));
    CHECK(rep.h_hi >= std::numbers::sqrt2 / 2.0 - 1e-6);
    CHECK(rep.lemma_bound >= rep.sampled.value - 1e-9);
    CHECK(rep.lemma_bound ==
          doctest::Approx(lemma_2_21_bound(rep.h_hi, rep.C, rep.dil, rep.L)).epsilon(1e-12));
}

TEST_CASE("fit_norm recovers the Euclidean norm on the point lattice") {
    auto F = fit_norm(load_pattern("point_lattice"), 1000.0, 32);
    for (const auto& v : F.vertices) CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-9));
    auto s = norm_stats(F);
    CHECK(s.lambda == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("fit_norm on lattice_2x1 matches the limit values on the axes") {
    auto F = fit_norm(load_pattern("lattice_2x1"), 1000.0, 64);
    CHECK(eval(F, {1, 0}) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(eval(F, {0, 1}) == doctest::Approx(1.0).epsilon(1e-6));
    auto s = norm_stats(F);
    CHECK(s.lambda == doctest::Approx(2.0).epsilon(1e-4));
    // fitted ball sits inside the ellipse (x/2)^2 + y^2 <= 1 up to the
    // finite-R fitting error (order K / R_fit)
    for (const auto& v : F.vertices)
        CHECK((v.x / 2.0) * (v.x / 2.0) + v.y * v.y <= 1.0 + 0.05);
}

TEST_CASE("gh height and bound") {
    CHECK(gh_height(1.0, 1.0, 0.0, 2.0) == doctest::Approx(0.0));
    CHECK(gh_height(1.0, 100.0, 1.0, 3.0) ==
          doctest::Approx(std::sqrt(8.0 * 3.0 * 1.0 * 0.01 + 0.0001)).epsilon(1e-12));
    CHECK(gh_bound(1.0, 100.0, 1.0, 3.0) ==
          doctest::Approx(gh_height(1.0, 100.0, 1.0, 3.0) + 0.01).epsilon(1e-12));
    // filling guarantee: sqrt(H^2 + a^2) >= a + K/R for a in [0, 4 lambda r]
    double r = 1.0, R = 10.0, K = 1.0, lambda = 2.0;
    double H = gh_height(r, R, K, lambda);
    for (int t = 0; t < 1000; ++t) {
        double a = uniform(17, t, 0, 0.0, 4.0 * lambda * r);
        CHECK(std::sqrt(H * H + a * a) >= a + K / R - 1e-12);
    }
}

TEST_CASE("distortion of the point lattice is zero") {
    auto spec = load_pattern("point_lattice");
    double d = gh_distortion_bound(spec, NormSpec::euclidean(), 1.0, 100.0, 500, 9);
    CHECK(d <= 1e-9);
}

TEST_CASE("swif regions of the point lattice are empty") {
    auto spec = load_pattern("point_lattice");
    auto F = NormSpec::euclidean();
    auto reg = swif_regions(spec, F, 1.0, 100.0, AxisBox{{-2.5, -2.5}, {2.5, 2.5}}, 64, 0.0);
    CHECK(reg.vol_U1.lo == 0.0);
    CHECK(reg.vol_U2.lo == 0.0);
    CHECK(reg.containment_ok);
}

TEST_CASE("swif bound is zero when K is zero") {
    auto F = NormSpec::euclidean();
    VolumeBracket z{0.0, 0.0, 0.01, false};
    CHECK(swif_bound(1.0, 100.0, 0.0, 1.0, F, z, z) == doctest::Approx(0.0));
}

TEST_CASE("calibration table is identically zero") {
    auto spec = load_pattern("point_lattice");
    auto rep = convergence_table(spec, NormSpec::euclidean(), 1.0, {10.0, 100.0}, 64, 200, 3,
                                 KSource::Sampled);
    REQUIRE(rep.rows.size() == 2);
    for (const auto& row : rep.rows) {
        CHECK(row.K_over_R <= 1e-12);
        CHECK(row.delta_R <= 1e-9);
        CHECK(row.M_R <= 1e-9);
        CHECK(row.distortion <= 1e-9);
        CHECK(row.vol_U1.lo == 0.0);
        CHECK(row.vol_U2.lo == 0.0);
    }
}

TEST_CASE("csv header and determinism") {
    auto spec = load_pattern("point_lattice");
    auto a = convergence_table(spec, NormSpec::euclidean(), 1.0, {10.0, 100.0}, 32, 100, 3,
                               KSource::Sampled);
    auto b = convergence_table(spec, NormSpec::euclidean(), 1.0, {10.0, 100.0}, 32, 100, 3,
                               KSource::Sampled);
    auto csv_a = convergence_csv(a);
    CHECK(csv_a == convergence_csv(b));
    std::istringstream in(csv_a);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "R,K_over_R,H,delta_R,vol_U1_lo,vol_U1_hi,vol_U2_lo,vol_U2_hi,M_R,distortion");
    int rows = 0;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("argument validation") {
    auto spec = load_pattern("point_lattice");
    CHECK_THROWS(convergence_table(spec, NormSpec::euclidean(), 1.0, {100.0, 10.0}, 32, 100, 3));
    CHECK_THROWS(fit_norm(spec, 100.0, 8));
    CHECK_THROWS(estimate_K(spec, NormSpec::euclidean(), AxisBox{{-1, -1}, {1, 1}}, 1, 0));
}
