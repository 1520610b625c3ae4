#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smock/geometry.hpp"

namespace smock {

// One stitch: a connected compact union of segments/boxes, identified to a
// single point by the smocking map.  The anchor is the parametrization point
// and must lie on the stitch.
struct Stitch {
    std::string id;
    std::vector<Component> components;
    Vec2 anchor;

    AxisBox bounds() const;
    double diameter() const;
    bool contains(Vec2 p, double tol = 1e-12) const;
};

struct Lattice {
    Vec2 v1;
    Vec2 v2;
};

// A smocking pattern: finite (generators only) or lattice-periodic
// (every generator translated by all integer combinations of the lattice
// vectors).
struct PatternSpec {
    std::string name;
    int dimension = 2;
    std::vector<Stitch> generators;
    std::optional<Lattice> lattice;

    bool periodic() const { return lattice.has_value(); }
    // Axis-aligned bounding box of {a v1 + b v2 : a, b in [0,1]} for
    // periodic patterns.
    AxisBox fundamental_domain() const;
    double max_generator_diameter() const;
};

struct BracketedLength {
    double lo = 0.0;
    double hi = 0.0;
};

enum class NicenessVerdict { Nice, NotNice, Inconclusive };

struct NicenessReport {
    std::vector<double> eps;
    std::vector<BracketedLength> volumes;  // bracketed Vol(T_eps(S) ∩ window)
    NicenessVerdict verdict = NicenessVerdict::Inconclusive;
};

struct CoverRadiusResult {
    bool ok = false;
    double worst_distance = 0.0;
    Vec2 worst_point;
};

struct PatternInvariants {
    double separation = 0.0;  // +inf sentinel for single-stitch patterns
    BracketedLength depth;
    double length_min = 0.0;
    double length_max = 0.0;
    bool cover_radius_ok = false;
};

// Parse / serialize the pattern JSON dialect.  Unknown keys are rejected.
PatternSpec load_pattern_json(const std::string& text);
PatternSpec load_pattern_file(const std::string& path);
std::string pattern_to_json(const PatternSpec& spec);

// Validates stitch connectivity, anchors, lattice non-degeneracy and
// positive separation; throws std::invalid_argument on violation.
void validate_pattern(const PatternSpec& spec);

// Stitches (generator translates for periodic specs) whose components
// intersect the window, in deterministic order with deterministic ids.
std::vector<Stitch> instantiate(const PatternSpec& spec, const AxisBox& window);

// Smocking separation factor: min pairwise set distance between stitches.
// Returns +inf for single-stitch finite patterns.
double separation(const PatternSpec& spec);

// Exact (L_min, L_max) over generator diameters.
std::pair<double, double> lengths(const PatternSpec& spec);

// Distance from a point to the materialized stitch set.
double distance_to_pattern(Vec2 p, const std::vector<Stitch>& stitches);

// Brackets the smocking depth h = sup D over the fundamental domain
// (periodic) or a caller window (finite) to within tol, by branch-and-bound
// on the 1-Lipschitz distance function D.
BracketedLength depth(const PatternSpec& spec, double tol,
                      const std::optional<AxisBox>& finite_window = std::nullopt);

// Bracketed area of T_eps(stitches) ∩ window via exact per-cell
// classification on a grid x grid raster.
BracketedLength tube_area_bracket(const std::vector<Stitch>& stitches, double eps,
                                  const AxisBox& window, int grid);

// Per-eps bracketed tube volumes with a three-valued verdict against the
// threshold; a limit cannot be certified from finitely many eps, so the
// verdict is evidence, not proof.
NicenessReport niceness_report(const PatternSpec& spec, const AxisBox& window,
                               const std::vector<double>& eps_schedule,
                               double threshold, int grid = 512);

// Samples the fundamental domain (or window) and verifies D(x) <= h_hi + L_max.
CoverRadiusResult cover_radius_check(const PatternSpec& spec, const BracketedLength& depth_bracket,
                                     int samples, std::uint64_t seed,
                                     const std::optional<AxisBox>& finite_window = std::nullopt);

PatternInvariants pattern_invariants(const PatternSpec& spec, double depth_tol = 1e-3,
                                     const std::optional<AxisBox>& finite_window = std::nullopt);

}  // namespace smock
