#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "smock/pattern.hpp"

namespace smock {

// Sentinel stitch id used for the two path endpoints in a witness.
inline constexpr const char* kTerminal = "TERMINAL";

struct Hop {
    std::string stitch;  // stitch id or kTerminal
    Vec2 entry;
    Vec2 exit;
};

// A minimizing jump configuration: TERMINAL(v), I_{j_1}, ..., I_{j_k},
// TERMINAL(w) with the straight free-space segments between consecutive
// hops.  total = sum(segment_lengths); consecutive stitch ids distinct.
struct PathWitness {
    double total = 0.0;
    std::vector<Hop> hops;
    std::vector<double> segment_lengths;  // hops.size() - 1 entries
};

struct RescaledMetric {
    PatternSpec base;
    double R = 1.0;
};

struct SandwichResult {
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double lower_bound = 0.0;  // min{r / diam_estimate, 1}
    double diam_estimate = 0.0;
    int pairs = 0;
    bool ok = false;
};

// Reusable solver for one pattern.  Construction is cheap; the periodic
// fast-path tables (translation-invariant edge weights, certified
// potential lower bounds) are built lazily on first large query.  All
// query methods are const and safe to call concurrently.
class Smocked {
  public:
    explicit Smocked(PatternSpec spec);
    ~Smocked();
    Smocked(Smocked&&) noexcept;
    Smocked& operator=(Smocked&&) noexcept;

    const PatternSpec& spec() const;
    double separation() const;
    double max_length() const;

    std::pair<double, PathWitness> distance(Vec2 v, Vec2 w) const;
    double value(Vec2 v, Vec2 w) const;

    // Certified lower bound on d̄(v, w) from the 1-Lipschitz
    // stitch-constant potential family; never exceeds the true value.
    double lower_bound(Vec2 v, Vec2 w) const;

    // Certified two-sided bracket.  Exact (lo == hi) whenever the
    // candidate corridor is small enough for the exact solver; otherwise
    // lo is the potential bound and hi comes from an explicit path built
    // by subadditive composition of exactly-solved mid-scale stitch
    // distances.  Large-scale convergence estimates consume this.
    struct DistBracket {
        double lo = 0.0;
        double hi = 0.0;
        bool exact = false;
    };
    DistBracket bracket(Vec2 v, Vec2 w) const;

    // Same contract as bracket() but never runs the exact solver: lo is
    // the potential bound, hi is min(d_E, subadditive path).  O(table
    // lookup) per call, meant for per-cell raster classification.
    DistBracket fast_bracket(Vec2 v, Vec2 w) const;

    // d̄ from x0 to the identified point of every stitch whose components
    // meet `window`; order[] sorts indices by ascending distance.
    struct SourceField {
        Vec2 x0;
        std::vector<Stitch> stitches;
        std::vector<double> dist;
        std::vector<std::size_t> order;
    };
    SourceField source_field(Vec2 x0, const AxisBox& window) const;

    // d̄(x0, p) = min(|x0 - p|, min_I dist(x0, I) + dist(I, p)); exact when
    // every stitch relevant to p lies in the field window.
    static double field_value(const SourceField& field, Vec2 p);

    struct Impl;

  private:
    std::unique_ptr<Impl> impl_;
};

// Def 2.1 exact smocked distance with a minimizing witness.
std::pair<double, PathWitness> smocked_distance(const PatternSpec& spec, Vec2 v, Vec2 w);

// Brute-force DP over the explicit d_k formulas; test oracle only.
// Exact when k_max >= ceil(|v - w| / separation).
double layered_oracle(const PatternSpec& spec, Vec2 v, Vec2 w, int k_max);

// d̄ from v to the identified point of the named stitch (generator id, or
// a materialized "gen@i,j" instance id).  Throws on unknown id.
double distance_point_to_stitchpoint(const PatternSpec& spec, Vec2 v, const std::string& stitch_id);

// rho_x0(v) = d̄(x0, v); if x0 lies on a stitch the source is the stitch.
double rho(const PatternSpec& spec, Vec2 x0, Vec2 v);

// d_R(x, y) = d̄(Rx, Ry) / R.
double rescaled_distance(const RescaledMetric& metric, Vec2 x, Vec2 y);

// Samples point pairs in window \ T_r(S) and reports the worst ratios
// d̄(p,q)/|p-q| against the Lemma 3.3 sandwich.  Throws if the window is
// (effectively) contained in the tube.
SandwichResult bilipschitz_sandwich_check(const PatternSpec& spec, const AxisBox& window,
                                          double r, int samples, std::uint64_t seed);

}  // namespace smock
