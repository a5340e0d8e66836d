#pragma once

#include <optional>
#include <vector>

#include "celab/cover.hpp"
#include "celab/ratmap.hpp"

namespace celab {

/// Shrinking-neighborhood schedule: delta_k = 2^-(k+2), Delta_n = prod_{k<n}(1 - delta_k).
/// The infinite product is bounded below by 1 - sum delta_k = 1/2.
struct ShrinkingSchedule {
    std::vector<double> deltas; // delta_0 .. delta_{n-1}
    std::vector<double> Deltas; // Delta_0 = 1 .. Delta_n

    // Delta_n * (1 - sum of the tail deltas): a bound on the full infinite product.
    double certified_lower_bound() const;
};

ShrinkingSchedule shrinking_schedule(int n);

struct BranchLevel {
    double U_diam = 0.0;
    double U_prime_diam = 0.0;
    bool univalent = false; // no U_j, j <= k, contains a critical point
    bool levels_filled = false;
    double log_deriv_prefix = 0.0; // log |(f^k)'(z_{-k})|
};

/// One backward branch z_0, z_{-1}, ..., z_{-n} with optional per-level
/// shrinking-neighborhood data.
struct BackwardBranch {
    SpherePoint base;
    double radius = 0.0; // r used by branch_pullback, 0 before levels are filled
    std::vector<SpherePoint> points; // z_0 .. z_{-n}
    std::vector<BranchLevel> levels; // 1 .. n
};

/// All d^n branches of consecutive preimages of c, children ordered by the
/// deterministic root order. Throws ResourceError past the branch cap.
std::vector<BackwardBranch> preimage_tree(const RationalMap& f, const SpherePoint& c, int n,
                                          long long cap = 2000000);

struct CE2Estimate {
    double lambda2 = 0.0;
    double C2 = 0.0;
    std::vector<double> per_n_min;     // min over branches of |(f^n)'(z_{-n})|, n = 1..N
    std::vector<double> per_n_min_log; // same in log space
    bool observed = false;
};

/// Minimum spherical derivative over the full preimage tree of c at each depth,
/// with the same tail-window exponent fit as the CE estimator.
CE2Estimate ce2_min_derivative(const RationalMap& f, const CriticalSet& cs,
                               const SpherePoint& c, int n, long long cap = 2000000,
                               int threads = 0);

/// Shrinking neighborhoods U_k, U_k' along one branch; boundaries are lifted
/// curves from the cover module.
struct PullbackResult {
    BackwardBranch branch;
    std::vector<LiftedCurve> curves;       // boundary of U_k
    std::vector<LiftedCurve> curves_prime; // boundary of U_k'
};

PullbackResult branch_pullback(const RationalMap& f, const CriticalSet& cs,
                               const BackwardBranch& branch, double r,
                               const ShrinkingSchedule& schedule, int samples = 256);

struct Scale {
    double R = 0.1;
    double R_prime = 0.01;

    Scale() = default;
    Scale(double R_, double Rp) : R(R_), R_prime(Rp) {
        if (!(R_prime < R) || !(R < 1.0) || !(R_prime > 0.0))
            throw DomainError("Scale: 0 < R' < R < 1 required");
    }
};

struct Type1Result {
    bool is_type1 = false;
    std::optional<SpherePoint> witness_c_prime;  // f(c') lands in B(f(z), R)
    std::optional<SpherePoint> witness_c_second; // c'' on the boundary of U_n
};

/// Type-1 test for a pulled-back branch: (1) all U_k critical-free,
/// (2) some critical point within tol of the lifted boundary of U_n,
/// (3) some critical value in B(f(z), R).
Type1Result type1_detect(const RationalMap& f, const CriticalSet& cs,
                         const PullbackResult& pullback, const Scale& scale, double tol);

struct CECE2Record {
    int mu_max = 0;
    int mu_c = 0;
    double lambda = 0.0;          // fitted from the CE2 estimate
    double implied_lambda2 = 0.0; // lambda * exp(-alpha (mu_max - mu_c))
    std::vector<double> lhs_log;          // mu_max * log min|(f^k)'|, k = 1..n
    std::vector<double> rhs_sr_log;       // k log lambda + (mu_max-mu_c)(log C - alpha k)
    std::vector<double> rhs_fixed_r1_log; // k log lambda + (mu_max-mu_c) log r1
    double const_sr = 0.0;       // largest const with lhs >= const * rhs for all k
    double const_fixed_r1 = 0.0;
    CE2Estimate ce2;
};

/// Numerical check of the inequality behind CE -> CE2: the minimum backward
/// derivative to the power mu_max against the lambda^n template, with the SR
/// substitution r1 >= C e^{-alpha n}.
CECE2Record cece2_check(const RationalMap& f, const CriticalSet& cs, const SpherePoint& c,
                        int n, double r1, double alpha, double C, long long cap = 2000000);

} // namespace celab
