#pragma once

#include <optional>
#include <span>
#include <vector>

#include "celab/polynomial.hpp"
#include "celab/sphere.hpp"

namespace celab {

struct CriticalPoint {
    SpherePoint point;
    int mu;            // local degree, >= 2
    bool in_julia;     // true until julia_classify or an override says otherwise
    bool classified;   // false before julia_classify runs
    bool warning;      // classification was undecided at the horizon
};

struct CriticalSet {
    std::vector<CriticalPoint> entries;

    std::vector<CriticalPoint> crit_prime() const;
    bool crit_prime_empty() const;
    // max mu over Crit'; throws DomainError when Crit' is empty.
    int mu_max() const;
    bool contains_prime(const SpherePoint& c, double tol = 1e-9) const;
};

/// Rational map f = P/Q in reduced form, degree = max(deg P, deg Q) >= 2.
class RationalMap {
public:
    RationalMap(Polynomial numerator, Polynomial denominator);

    int degree() const { return degree_; }
    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    // P'Q - PQ'; its roots are the finite critical points.
    const Polynomial& wronskian() const { return wronskian_; }
    // Coefficient reversal to the common degree: f(1/w) = num_rev(w)/den_rev(w).
    const Polynomial& numerator_reversed() const { return num_rev_; }
    const Polynomial& denominator_reversed() const { return den_rev_; }
    const Polynomial& wronskian_reversed() const { return wronskian_rev_; }
    bool is_polynomial() const { return den_.degree() == 0; }

private:
    Polynomial num_, den_;
    Polynomial wronskian_;
    Polynomial num_rev_, den_rev_, wronskian_rev_;
    int degree_;
};

SpherePoint eval(const RationalMap& f, const SpherePoint& z);

/// f^n(z).
SpherePoint iterate(const RationalMap& f, SpherePoint z, int n);

/// All solutions of f(w) = z with multiplicity; total multiplicity equals degree.
/// Finite preimages sorted by (re, im); infinity (if present) last.
std::vector<std::pair<SpherePoint, int>> preimages(const RationalMap& f, const SpherePoint& z);

/// Critical points with local degrees; infinity handled through the degree
/// deficit of the Wronskian (Riemann-Hurwitz). in_julia defaults to true.
CriticalSet critical_points(const RationalMap& f);

struct JuliaOverride {
    SpherePoint point;
    bool in_julia;
};

/// Heuristic Julia membership: an orbit that reaches a detected attracting or
/// superattracting cycle (or escapes, for polynomials) is Fatou; landing on a
/// repelling cycle is Julia; anything undecided stays Julia with a warning.
/// Overrides win unconditionally.
CriticalSet julia_classify(const RationalMap& f, CriticalSet cs, int horizon,
                           std::span<const JuliaOverride> overrides = {});

/// Fixed points with the modulus of their multiplier.
std::vector<std::pair<SpherePoint, double>> fixed_points(const RationalMap& f);

/// f composed with g (f after g).
RationalMap compose(const RationalMap& f, const RationalMap& g);

} // namespace celab
