#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smock/metric.hpp"
#include "smock/norm.hpp"
#include "smock/pattern.hpp"
#include "smock/raster.hpp"

namespace smock {

// Sampled lower estimate of the constant K in
// |dbar(x, x') - F(x - x')| <= K.
struct KEstimate {
    double value = 0.0;
    Vec2 witness_a;
    Vec2 witness_b;
    AxisBox box;
    int samples = 0;
    std::uint64_t seed = 0;
};

// K is reported as a (sampled lower estimate, Lemma 2.21 upper bound)
// pair; the bound is 2h + C + 2 dil(F)(h + L).
struct KReport {
    KEstimate sampled;
    double h_hi = 0.0;  // smocking depth upper bracket
    double C = 0.0;     // stitch-graph norm deviation
    double dil = 0.0;
    double L = 0.0;  // max stitch length
    double lemma_bound = 0.0;
};

enum class KSource { Lemma221, Sampled };

struct SwifRegions {
    VolumeBracket vol_U1;  // {F > r, dbar_R < r}
    VolumeBracket vol_U2;  // {F < r, dbar_R > r}
    bool containment_ok = false;
};

struct ConvergenceRow {
    double R = 0.0;
    double K_over_R = 0.0;
    double H = 0.0;
    double delta_R = 0.0;  // H + K/R
    VolumeBracket vol_U1;
    VolumeBracket vol_U2;
    double M_R = 0.0;
    double distortion = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    bool monotone_gh = false;
    bool monotone_swif = false;
};

// Max over sampled pairs of |dbar(x,x') - F(x-x')|; a lower estimate of
// the true sup. Deterministic in (box, samples, seed) and monotone under
// appending samples.
KEstimate estimate_K(const PatternSpec& spec, const NormSpec& F, const AxisBox& box, int samples,
                     std::uint64_t seed);

// Max over stitch pairs instantiated in window of
// |d(I_j, I_j') - F(j - j')| at the anchor points.
double estimate_C(const PatternSpec& spec, const NormSpec& F, const AxisBox& window);

double lemma_2_21_bound(double h, double C, double dilF, double L);

KReport k_report(const PatternSpec& spec, const NormSpec& F, const AxisBox& box, int samples,
                 std::uint64_t seed);

// Empirical tangent-cone norm: gauge of the symmetrized convex hull of
// u_i * R / dbar(0, R u_i) over n equally spaced directions.
NormSpec fit_norm(const PatternSpec& spec, double R, int n_directions);

// Eq. (157): H = sqrt(8 lambda r (K/R) + (K/R)^2).
double gh_height(double r, double R, double K, double lambda);

// delta_R = H + K/R, the GH convergence bound.
double gh_bound(double r, double R, double K, double lambda);

// (1/2) max over sampled pairs in F^{-1}[0, r] of
// |d_R(v, w) - F(v - w)|; independent GH upper bound.
double gh_distortion_bound(const PatternSpec& spec, const NormSpec& F, double r, double R,
                           int samples, std::uint64_t seed);

// Per-cell bracketed areas of the SWIF excess regions on an n x n grid
// over a square window covering B_{2 lambda r}(0); containment checks
// the Eq. (254) bands with the provided K plus grid slack.
SwifRegions swif_regions(const PatternSpec& spec, const NormSpec& F, double r, double R,
                         const AxisBox& window, int n, double K);

// Eq. (252) mass bound; each Vol(U_i) enters as the minimum of its
// raster upper bracket and the analytic band bound (K/R) lambda alpha
// r^{N-1} from Eq. (254)/(256).
double swif_bound(double r, double R, double K, double lambda, const NormSpec& F,
                  const VolumeBracket& vol_U1, const VolumeBracket& vol_U2);

ConvergenceReport convergence_table(const PatternSpec& spec, const NormSpec& F, double r,
                                    const std::vector<double>& R_schedule, int grid, int samples,
                                    std::uint64_t seed, KSource ksource = KSource::Lemma221);

// Header "R,K_over_R,H,delta_R,vol_U1_lo,vol_U1_hi,vol_U2_lo,vol_U2_hi,
// M_R,distortion", 9 significant digits.
std::string convergence_csv(const ConvergenceReport& report);

}  // namespace smock
