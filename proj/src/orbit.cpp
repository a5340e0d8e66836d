#include "celab/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace celab {

OrbitSeries forward_orbit(const RationalMap& f, const SpherePoint& z0, int n) {
    if (n < 1) throw DomainError("forward_orbit: n >= 1 required");
    OrbitSeries s;
    s.points.reserve(n + 1);
    s.log_deriv_prefix.reserve(n + 1);
    s.points.push_back(z0);
    s.log_deriv_prefix.push_back(0.0);
    for (int k = 0; k < n; ++k) {
        double d = spherical_deriv(f, s.points.back());
        if (d > 0.0 && !s.critical_hit) {
            s.log_deriv_prefix.push_back(s.log_deriv_prefix.back() + std::log(d));
        } else {
            if (!s.critical_hit) s.critical_hit = k;
            s.log_deriv_prefix.push_back(-std::numeric_limits<double>::infinity());
        }
        s.points.push_back(eval(f, s.points.back()));
    }
    return s;
}

ExponentFit fit_growth(const std::vector<double>& v, bool include_zero) {
    const int n = static_cast<int>(v.size());
    if (n < 1) throw DomainError("fit_growth: empty series");
    int lo = std::max(1, n / 2);
    double min_a = std::numeric_limits<double>::infinity();
    for (int k = lo; k <= n; ++k) min_a = std::min(min_a, v[k - 1] / k);
    double log_lambda = min_a;
    double min_c = include_zero ? 0.0 : std::numeric_limits<double>::infinity();
    for (int k = 1; k <= n; ++k) min_c = std::min(min_c, v[k - 1] - k * log_lambda);
    return {std::exp(log_lambda), std::exp(min_c)};
}

CEEstimate ce_exponent(const RationalMap& f, const CriticalSet& cs, const SpherePoint& c,
                       int n) {
    if (n < 1) throw DomainError("ce_exponent: N >= 1 required");
    if (cs.crit_prime_empty()) throw DomainError("ce_exponent: Crit'(f) is empty");
    if (!cs.contains_prime(c)) throw DomainError("ce_exponent: c is not in Crit'(f)");

    OrbitSeries orbit = forward_orbit(f, eval(f, c), n);
    CEEstimate est;
    est.log_prefix = orbit.log_deriv_prefix;
    est.critical_hit = orbit.critical_hit;
    est.per_n_exponents.resize(n);
    for (int k = 1; k <= n; ++k) est.per_n_exponents[k - 1] = orbit.log_deriv_prefix[k] / k;
    if (orbit.critical_hit) {
        est.lambda1 = 0.0;
        est.C1 = 0.0;
        est.observed = false;
        return est;
    }
    std::vector<double> v(orbit.log_deriv_prefix.begin() + 1, orbit.log_deriv_prefix.end());
    ExponentFit fit = fit_growth(v, /*include_zero=*/true); // CE is stated for n >= 0
    est.lambda1 = fit.lambda;
    est.C1 = fit.C;
    est.observed = fit.lambda > 1.0;
    return est;
}

SrDistances sr_distances(const RationalMap& f, const CriticalSet& cs, const SpherePoint& c,
                         int n) {
    if (n < 1) throw DomainError("sr_distances: N >= 1 required");
    auto prime = cs.crit_prime();
    if (prime.empty()) throw DomainError("sr_distances: Crit'(f) is empty");

    SrDistances out;
    out.values.reserve(n);
    SpherePoint z = c;
    for (int k = 1; k <= n; ++k) {
        z = eval(f, z);
        double d = std::numeric_limits<double>::infinity();
        for (const auto& e : prime) d = std::min(d, chordal_dist(z, e.point));
        out.values.push_back(d);
        if (d == 0.0 && !out.exact_hit_n) out.exact_hit_n = k;
    }
    return out;
}

SREstimate sr_alpha_fit(const std::vector<double>& d, double C) {
    if (d.empty()) throw DomainError("sr_alpha_fit: empty distance series");
    if (!(C > 0.0)) throw DomainError("sr_alpha_fit: C > 0 required");
    for (double v : d)
        if (v <= 0.0) throw DomainError("sr_alpha_fit: SR violation (zero distance)");

    SREstimate est;
    est.C = C;
    est.distance_series = d;
    double alpha = 0.0;
    int witness = 1;
    for (int k = 1; k <= static_cast<int>(d.size()); ++k) {
        double a = std::log(C / d[k - 1]) / k;
        if (a > alpha) {
            alpha = a;
            witness = k;
        }
    }
    if (alpha == 0.0) {
        // Bound holds with alpha = 0; witness where it is tight (min distance vs C).
        double best = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= static_cast<int>(d.size()); ++k) {
            if (d[k - 1] < best) {
                best = d[k - 1];
                witness = k;
            }
        }
    }
    est.alpha = alpha;
    est.witness_n = witness;
    return est;
}

FirstReturnBound first_return_bound(const RationalMap& f, const CriticalSet& cs, double R,
                                    int n) {
    if (!(R > 0.0)) throw DomainError("first_return_bound: R > 0 required");
    if (n < 1) throw DomainError("first_return_bound: N >= 1 required");
    auto prime = cs.crit_prime();
    if (prime.empty()) throw DomainError("first_return_bound: Crit'(f) is empty");

    FirstReturnBound out;
    for (const auto& entry : prime) {
        FirstReturnEntry fe;
        fe.c = entry.point;
        OrbitSeries value_orbit = forward_orbit(f, eval(f, entry.point), n);
        SpherePoint z = entry.point;
        for (int m = 1; m <= n; ++m) {
            z = eval(f, z);
            double d = std::numeric_limits<double>::infinity();
            for (const auto& e : prime) d = std::min(d, chordal_dist(z, e.point));
            if (d < R) {
                fe.m = m;
                fe.K_c = std::exp(value_orbit.log_deriv_prefix[m - 1]);
                break;
            }
        }
        if (fe.K_c) {
            if (!out.K || *fe.K_c > *out.K) out.K = fe.K_c;
        }
        out.entries.push_back(fe);
    }
    return out;
}

} // namespace celab
