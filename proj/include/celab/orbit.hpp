#pragma once

#include <optional>
#include <vector>

#include "celab/ratmap.hpp"

namespace celab {

/// Forward orbit with log-derivative prefix sums:
/// log_deriv_prefix[k] = sum_{j<k} log spherical_deriv(f, points[j]).
struct OrbitSeries {
    std::vector<SpherePoint> points;
    std::vector<double> log_deriv_prefix;
    std::optional<int> critical_hit; // first k with spherical_deriv == 0
};

OrbitSeries forward_orbit(const RationalMap& f, const SpherePoint& z0, int n);

/// Fitted Collet-Eckmann data for one critical point:
/// |(f^n)'(f(c))| >= C1 * lambda1^n over the computed horizon.
struct CEEstimate {
    double lambda1 = 0.0;
    double C1 = 0.0;
    std::vector<double> per_n_exponents; // a_n = (1/n) log |(f^n)'(f(c))|, n = 1..N
    std::vector<double> log_prefix;      // log |(f^n)'(f(c))|, n = 0..N
    bool observed = false;               // lambda1 > 1
    std::optional<int> critical_hit;
};

/// a_n series along the orbit of the critical value; lambda1 is the minimum of
/// a_n over the tail window [N/2, N] (conservative), C1 the binding constant.
CEEstimate ce_exponent(const RationalMap& f, const CriticalSet& cs, const SpherePoint& c,
                       int n);

struct SrDistances {
    std::vector<double> values;      // d_n = min_{c' in Crit'} sigma(f^n(c), c'), n = 1..N
    std::optional<int> exact_hit_n;  // SR violation: f^n(c) hit a critical point exactly
};

SrDistances sr_distances(const RationalMap& f, const CriticalSet& cs, const SpherePoint& c,
                         int n);

struct SREstimate {
    double alpha = 0.0;
    double C = 0.0;
    std::vector<double> distance_series;
    int witness_n = 0; // 1-based n attaining the binding constraint
};

/// Smallest alpha >= 0 with d_n >= C e^{-alpha n} for all n; equality at witness_n.
SREstimate sr_alpha_fit(const std::vector<double>& d, double C);

struct FirstReturnEntry {
    SpherePoint c;
    std::optional<int> m;        // least m <= N with a return into B(Crit', R)
    std::optional<double> K_c;   // |(f^{m-1})'(f(c))|, spherical
};

struct FirstReturnBound {
    std::optional<double> K;     // max K_c over critical points with a return
    std::vector<FirstReturnEntry> entries;
};

FirstReturnBound first_return_bound(const RationalMap& f, const CriticalSet& cs, double R,
                                    int n);

/// Shared fit: exponent = min of a_n over the tail window [N/2, N];
/// constant C = exp(min_n (prefix_n - n log lambda)) over include_zero ? n>=0 : n>=1.
struct ExponentFit {
    double lambda;
    double C;
};
ExponentFit fit_growth(const std::vector<double>& log_values_by_n, bool include_zero);

} // namespace celab
