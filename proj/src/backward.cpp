#include "celab/backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "celab/orbit.hpp"
#include "celab/parallel.hpp"

namespace celab {

double ShrinkingSchedule::certified_lower_bound() const {
    // tail sum of delta_k for k >= n is 2^-(n+1)
    double tail = std::ldexp(1.0, -(static_cast<int>(deltas.size()) + 1));
    return Deltas.back() * (1.0 - tail);
}

ShrinkingSchedule shrinking_schedule(int n) {
    if (n < 1) throw DomainError("shrinking_schedule: n >= 1 required");
    ShrinkingSchedule s;
    s.deltas.reserve(n);
    s.Deltas.reserve(n + 1);
    s.Deltas.push_back(1.0);
    for (int k = 0; k < n; ++k) {
        double delta = std::ldexp(1.0, -(k + 2));
        s.deltas.push_back(delta);
        double cur = s.Deltas.back();
        s.Deltas.push_back(cur - cur * delta);
    }
    return s;
}

namespace {

struct TreeNode {
    SpherePoint point;
    int parent;
    double log_prefix;       // log |(f^k)'(z_{-k})| along the branch
    bool critical_hit;       // the point is exactly critical (derivative 0)
};

struct Tree {
    std::vector<std::vector<TreeNode>> levels; // levels[0] = root
};

long long max_feasible_depth(int degree, long long cap) {
    long long count = 1, depth = 0;
    while (count * degree <= cap) {
        count *= degree;
        ++depth;
    }
    return depth;
}

Tree build_tree(const RationalMap& f, const SpherePoint& c, int n, long long cap) {
    if (n < 1) throw DomainError("preimage_tree: n >= 1 required");
    const int d = f.degree();
    long long count = 1;
    for (int k = 0; k < n; ++k) {
        count *= d;
        if (count > cap)
            throw ResourceError("preimage_tree: d^n exceeds the branch cap (max feasible n = " +
                                std::to_string(max_feasible_depth(d, cap)) + ")");
    }

    Tree t;
    t.levels.push_back({TreeNode{c, -1, 0.0, false}});
    for (int k = 1; k <= n; ++k) {
        const auto& prev = t.levels.back();
        std::vector<TreeNode> cur;
        cur.reserve(prev.size() * d);
        for (int pi = 0; pi < static_cast<int>(prev.size()); ++pi) {
            auto pre = preimages(f, prev[pi].point);
            for (const auto& [q, mult] : pre) {
                double s = spherical_deriv(f, q);
                bool hit = !(s > 0.0);
                double lp = hit ? -std::numeric_limits<double>::infinity()
                                : prev[pi].log_prefix + std::log(s);
                for (int m = 0; m < mult; ++m)
                    cur.push_back(TreeNode{q, pi, lp, hit || prev[pi].critical_hit});
            }
        }
        t.levels.push_back(std::move(cur));
    }
    return t;
}

} // namespace

std::vector<BackwardBranch> preimage_tree(const RationalMap& f, const SpherePoint& c, int n,
                                          long long cap) {
    Tree t = build_tree(f, c, n, cap);
    std::vector<BackwardBranch> out;
    out.reserve(t.levels.back().size());
    for (int leaf = 0; leaf < static_cast<int>(t.levels.back().size()); ++leaf) {
        BackwardBranch b;
        b.base = c;
        b.points.assign(n + 1, SpherePoint());
        b.levels.resize(n);
        int idx = leaf;
        for (int k = n; k >= 1; --k) {
            const TreeNode& node = t.levels[k][idx];
            b.points[k] = node.point;
            b.levels[k - 1].log_deriv_prefix = node.log_prefix;
            idx = node.parent;
        }
        b.points[0] = c;
        out.push_back(std::move(b));
    }
    return out;
}

CE2Estimate ce2_min_derivative(const RationalMap& f, const CriticalSet& cs,
                               const SpherePoint& c, int n, long long cap, int threads) {
    (void)threads;
    if (n < 1) throw DomainError("ce2_min_derivative: n >= 1 required");
    if (cs.crit_prime_empty()) throw DomainError("ce2_min_derivative: Crit'(f) is empty");
    if (!cs.contains_prime(c)) throw DomainError("ce2_min_derivative: c is not in Crit'(f)");

    // CE2 requires c not in the forward orbit of another critical point;
    // automatic under SR, enforced here to a finite horizon.
    const int orbit_horizon = 64;
    for (const auto& e : cs.entries) {
        if (chordal_dist(e.point, c) < 1e-9) continue;
        SpherePoint z = e.point;
        for (int k = 1; k <= orbit_horizon; ++k) {
            z = eval(f, z);
            if (chordal_dist(z, c) < 1e-9)
                throw DomainError(
                    "ce2_min_derivative: c lies in the forward orbit of another critical point");
        }
    }

    Tree t = build_tree(f, c, n, cap);
    CE2Estimate est;
    est.per_n_min_log.resize(n);
    est.per_n_min.resize(n);
    for (int k = 1; k <= n; ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& node : t.levels[k]) {
            if (node.critical_hit) {
                Complex v = node.point.is_inf() ? Complex(0, 0) : node.point.value();
                throw NumericError(
                    "ce2_min_derivative: SR violation, branch hits a critical point exactly at "
                    "depth " +
                    std::to_string(k) + " near (" + std::to_string(v.real()) + ", " +
                    std::to_string(v.imag()) + ")");
            }
            best = std::min(best, node.log_prefix);
        }
        est.per_n_min_log[k - 1] = best;
        est.per_n_min[k - 1] = std::exp(best);
    }
    ExponentFit fit = fit_growth(est.per_n_min_log, /*include_zero=*/false);
    est.lambda2 = fit.lambda;
    est.C2 = fit.C;
    est.observed = fit.lambda > 1.0;
    return est;
}

PullbackResult branch_pullback(const RationalMap& f, const CriticalSet& cs,
                               const BackwardBranch& branch, double r,
                               const ShrinkingSchedule& schedule, int samples) {
    if (!(r > 0.0) || r >= 2.0) throw DomainError("branch_pullback: 0 < r < 2 required");
    const int n = static_cast<int>(branch.points.size()) - 1;
    if (n < 1) throw DomainError("branch_pullback: branch length >= 1 required");
    if (static_cast<int>(schedule.Deltas.size()) < n + 2)
        throw DomainError("branch_pullback: schedule shorter than the branch");

    PullbackResult res;
    res.branch = branch;
    res.branch.radius = r;

    bool univalent_so_far = true;
    for (int k = 1; k <= n; ++k) {
        std::vector<SpherePoint> chain(branch.points.begin(), branch.points.begin() + k + 1);
        LiftedCurve uk, ukp;
        try {
            uk = lift_tower(f, ChordalDisk(branch.base, r * schedule.Deltas[k]), chain, samples)
                     .back();
            ukp = lift_tower(f, ChordalDisk(branch.base, r * schedule.Deltas[k + 1]), chain,
                             samples)
                      .back();
        } catch (const NumericError& e) {
            throw NumericError("branch_pullback: lift failed at level " + std::to_string(k) +
                               ": " + e.what());
        }

        BranchLevel& lvl = res.branch.levels[k - 1];
        lvl.U_diam = curve_diameter(uk);
        lvl.U_prime_diam = curve_diameter(ukp);
        bool has_crit = false;
        for (const auto& e : cs.entries) {
            try {
                if (point_in_component(uk, e.point)) {
                    has_crit = true;
                    break;
                }
            } catch (const NumericError&) {
                has_crit = true; // on-boundary counts as not avoiding Crit
                break;
            }
        }
        univalent_so_far = univalent_so_far && !has_crit;
        lvl.univalent = univalent_so_far;
        lvl.levels_filled = true;
        res.curves.push_back(std::move(uk));
        res.curves_prime.push_back(std::move(ukp));
    }
    return res;
}

Type1Result type1_detect(const RationalMap& f, const CriticalSet& cs,
                         const PullbackResult& pullback, const Scale& scale, double tol) {
    const BackwardBranch& branch = pullback.branch;
    const int n = static_cast<int>(branch.points.size()) - 1;
    if (n < 1 || pullback.curves.empty() || !branch.levels.back().levels_filled)
        throw DomainError("type1_detect: branch has no filled levels");
    if (!(branch.radius < 2.0 * scale.R_prime))
        throw DomainError("type1_detect: pullback radius must satisfy r < 2R'");

    Type1Result res;
    // (1) shrinking neighborhoods avoid critical points
    for (int k = 1; k <= n; ++k)
        if (!branch.levels[k - 1].univalent) return res;

    // (2) some critical point within tol of the lifted boundary of U_n
    const LiftedCurve& un = pullback.curves.back();
    for (const auto& e : cs.entries) {
        if (curve_distance(un, e.point) < tol) {
            res.witness_c_second = e.point;
            break;
        }
    }
    if (!res.witness_c_second) return res;

    // (3) some critical value inside B(f(z), R)
    SpherePoint fz = eval(f, branch.points[0]);
    for (const auto& e : cs.entries) {
        if (chordal_dist(eval(f, e.point), fz) < scale.R) {
            res.witness_c_prime = e.point;
            break;
        }
    }
    if (!res.witness_c_prime) return res;

    res.is_type1 = true;
    return res;
}

CECE2Record cece2_check(const RationalMap& f, const CriticalSet& cs, const SpherePoint& c,
                        int n, double r1, double alpha, double C, long long cap) {
    if (!(r1 > 0.0)) throw DomainError("cece2_check: r1 > 0 required");
    if (!(C > 0.0)) throw DomainError("cece2_check: C > 0 required");
    if (alpha < 0.0) throw DomainError("cece2_check: alpha >= 0 required");

    CECE2Record rec;
    rec.mu_max = cs.mu_max();
    rec.mu_c = 0;
    for (const auto& e : cs.entries)
        if (e.in_julia && chordal_dist(e.point, c) < 1e-9) rec.mu_c = e.mu;
    if (rec.mu_c == 0) throw DomainError("cece2_check: c is not in Crit'(f)");

    rec.ce2 = ce2_min_derivative(f, cs, c, n, cap);
    rec.lambda = rec.ce2.lambda2;
    const double log_lambda = std::log(rec.lambda);
    const int gap = rec.mu_max - rec.mu_c;
    rec.implied_lambda2 = rec.lambda * std::exp(-alpha * gap);

    rec.lhs_log.resize(n);
    rec.rhs_sr_log.resize(n);
    rec.rhs_fixed_r1_log.resize(n);
    double min_sr = std::numeric_limits<double>::infinity();
    double min_fixed = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) {
        rec.lhs_log[k - 1] = rec.mu_max * rec.ce2.per_n_min_log[k - 1];
        rec.rhs_sr_log[k - 1] = k * log_lambda + gap * (std::log(C) - alpha * k);
        rec.rhs_fixed_r1_log[k - 1] = k * log_lambda + gap * std::log(r1);
        min_sr = std::min(min_sr, rec.lhs_log[k - 1] - rec.rhs_sr_log[k - 1]);
        min_fixed = std::min(min_fixed, rec.lhs_log[k - 1] - rec.rhs_fixed_r1_log[k - 1]);
    }
    rec.const_sr = std::exp(min_sr);
    rec.const_fixed_r1 = std::exp(min_fixed);
    return rec;
}

} // namespace celab
