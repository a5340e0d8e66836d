#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "celab/ratmap.hpp"
#include "celab/rng.hpp"

namespace celab {

/// Closed polyline bounding Comp_w f^{-n}(B): the lift of the base circle
/// through n inverse steps, traversed `loops` times before closure.
struct LiftedCurve {
    std::vector<SpherePoint> vertices; // closed: sigma(first, last) < 1e-8
    int level = 0;
    SpherePoint base_center;
    double base_radius = 0.0;
    SpherePoint base_preimage;
    int loops = 1;

    ChordalDisk base_disk() const { return ChordalDisk(base_center, base_radius); }
};

/// Lifts the boundary circle level by level along the inverse branch fixed by
/// `chain`: chain[0] = f^n(w) inside the disk, f(chain[k]) = chain[k-1],
/// chain[n] = w. Returns the curves for levels 1..n. Continuation picks the
/// preimage nearest the previous lifted point and halves the step whenever the
/// two nearest candidates are within 3x of each other.
std::vector<LiftedCurve> lift_tower(const RationalMap& f, const ChordalDisk& disk,
                                    std::span<const SpherePoint> chain, int samples);

/// Boundary of the component of f^{-n}(B) containing w. n = 0 returns the base
/// circle itself.
LiftedCurve lift_circle(const RationalMap& f, const ChordalDisk& disk, const SpherePoint& w,
                        int n, int samples);

/// Max pairwise chordal distance over vertices. Exact O(V^2) for V <= 4096;
/// above that a chart convex hull is used when a quasiconvexity certificate
/// holds, with exact fallback otherwise.
double curve_diameter(const LiftedCurve& c);

/// Chordal distance from p to the curve (polyline chords in the R^3 embedding).
double curve_distance(const LiftedCurve& c, const SpherePoint& p);

/// Winding-number membership test in a rotated chart centered at p; the raw
/// winding of an interior point is +-loops. Throws on boundary ambiguity.
bool point_in_component(const LiftedCurve& c, const SpherePoint& p);

struct ExpShrinkEstimate {
    double lambda_exp = 0.0;
    double r_exp = 0.0;
    std::vector<double> per_n_max_diam; // max component diameter at depth n = 1..N
    bool observed = false;              // lambda_exp > 1
    bool unreliable = false;            // > 20% of lifts failed
    int attempted = 0;
    int failed = 0;
    int skipped_branches = 0; // branch sampling found no clean branch
};

struct ExpShrinkParams {
    double r = 0.1;
    int depth = 10;
    int base_samples = 4;
    int branch_samples = 16;
    int circle_samples = 256;
    std::optional<SpherePoint> anchor; // fixed base point; otherwise Julia-sampled
    std::uint64_t seed = 0;
    int threads = 0;
};

/// Samples base points on the Julia approximation (or uses the anchor), pulls
/// back B(x, r) along clean random backward branches, and fits the decay rate
/// of the max component diameter over the tail window [N/2, N].
ExpShrinkEstimate expshrink_estimate(const RationalMap& f, const ExpShrinkParams& params);

struct TCEParams {
    int M = 1;
    int P = 2;
    double r = 0.1;
};

struct TceResult {
    bool pass = false;
    SpherePoint z;
    TCEParams params;
    int horizon = 0;
    std::vector<int> chosen_nj;
    std::vector<int> per_j_counts;
    std::vector<int> all_counts; // per candidate n = 1..N; -1 marks a skipped lift
    int skipped = 0;
};

/// Greedy construction of the TCE sequence n_j: a candidate n is accepted when
/// the number of levels k < n whose pullback component around f^k(z) meets
/// Crit(f) is <= M and n <= P*j. Passes when j reaches floor(N/P).
TceResult tce_check(const RationalMap& f, const CriticalSet& cs, const SpherePoint& z,
                    const TCEParams& params, int horizon, int circle_samples,
                    const std::vector<SpherePoint>& julia_points);

/// Inverse-iteration sampling of J(f) from the most repelling fixed point.
/// The result always starts with the fixed point itself.
std::vector<SpherePoint> julia_sample(const RationalMap& f, int count, std::uint64_t seed,
                                      int burnin = 32);

/// Random backward branch (x = w_0, w_1, ..., w_n) avoiding exact critical
/// preimages, found by randomized backtracking; nullopt when none exists.
std::optional<std::vector<SpherePoint>> sample_clean_branch(const RationalMap& f,
                                                            const SpherePoint& x, int n,
                                                            CounterRng& rng);

struct LemmaConstants {
    long long s;
    long long M;
};

/// s = [-log(eps)/log(lambda) + 2 alpha n / log(lambda)] + 1 and
/// M = [log(sup |f'|) / log(lambda)] + 1, with [x] the integral part.
LemmaConstants lemma_constants(double epsilon, double alpha, int n, double lambda_exp,
                               double sup_deriv);

/// Grid maximization of the spherical derivative over both charts with local
/// compass refinement.
double sup_spherical_deriv(const RationalMap& f, int samples = 1000000);

} // namespace celab
