#include "celab/ratmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace celab {

std::vector<CriticalPoint> CriticalSet::crit_prime() const {
    std::vector<CriticalPoint> out;
    for (const auto& e : entries)
        if (e.in_julia) out.push_back(e);
    return out;
}

bool CriticalSet::crit_prime_empty() const {
    for (const auto& e : entries)
        if (e.in_julia) return false;
    return true;
}

int CriticalSet::mu_max() const {
    int m = 0;
    for (const auto& e : entries)
        if (e.in_julia) m = std::max(m, e.mu);
    if (m == 0) throw DomainError("mu_max: Crit'(f) is empty");
    return m;
}

bool CriticalSet::contains_prime(const SpherePoint& c, double tol) const {
    for (const auto& e : entries)
        if (e.in_julia && chordal_dist(e.point, c) < tol) return true;
    return false;
}

RationalMap::RationalMap(Polynomial numerator, Polynomial denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (num_.is_zero() || den_.is_zero())
        throw DomainError("RationalMap: numerator and denominator must be nonzero");
    degree_ = std::max(num_.degree(), den_.degree());
    if (degree_ < 2) throw DomainError("RationalMap: degree >= 2 required");

    // Reduced form: no common root within 1e-10.
    if (num_.degree() >= 1 && den_.degree() >= 1) {
        auto rn = poly_roots(num_);
        auto rd = poly_roots(den_);
        for (const auto& a : rn)
            for (const auto& b : rd)
                if (std::abs(a.value - b.value) < 1e-10 * std::max(1.0, std::abs(a.value)))
                    throw DomainError("RationalMap: P and Q share a root (not reduced)");
    }

    wronskian_ = (num_.derivative() * den_ - num_ * den_.derivative()).trimmed(1e-12);
    num_rev_ = num_.reversed(degree_);
    den_rev_ = den_.reversed(degree_);
    wronskian_rev_ = wronskian_.reversed(2 * degree_ - 2);
}

namespace {

SpherePoint ratio_point(Complex p, Complex q) {
    if (q == Complex(0, 0)) return SpherePoint::infinity();
    Complex v = p / q;
    if (std::isinf(v.real()) || std::isinf(v.imag()) || std::isnan(v.real()) ||
        std::isnan(v.imag()))
        return SpherePoint::infinity();
    return SpherePoint(v);
}

} // namespace

SpherePoint eval(const RationalMap& f, const SpherePoint& z) {
    if (z.is_inf())
        return ratio_point(f.numerator_reversed()(Complex(0, 0)),
                           f.denominator_reversed()(Complex(0, 0)));
    Complex v = z.value();
    if (std::abs(v) > 1.0) {
        Complex w = 1.0 / v;
        return ratio_point(f.numerator_reversed()(w), f.denominator_reversed()(w));
    }
    return ratio_point(f.numerator()(v), f.denominator()(v));
}

SpherePoint iterate(const RationalMap& f, SpherePoint z, int n) {
    for (int i = 0; i < n; ++i) z = eval(f, z);
    return z;
}

namespace {

std::vector<std::pair<SpherePoint, int>> roots_to_points(const std::vector<Root>& roots) {
    std::vector<std::pair<SpherePoint, int>> out;
    for (const auto& r : roots) out.emplace_back(SpherePoint(r.value), r.multiplicity);
    return out;
}

} // namespace

std::vector<std::pair<SpherePoint, int>> preimages(const RationalMap& f, const SpherePoint& z) {
    const int d = f.degree();
    std::vector<std::pair<SpherePoint, int>> out;

    if (z.is_inf()) {
        if (f.denominator().degree() >= 1) out = roots_to_points(poly_roots(f.denominator()));
        int at_inf = f.numerator().degree() - f.denominator().degree();
        if (at_inf > 0) out.emplace_back(SpherePoint::infinity(), at_inf);
        return out;
    }

    Complex v = z.value();
    Polynomial s = (std::abs(v) <= 1.0) ? (f.numerator() - f.denominator() * v)
                                        : (f.numerator() * (1.0 / v) - f.denominator());
    s = s.trimmed(1e-12);
    if (s.is_zero()) throw NumericError("preimages: degenerate equation");
    int missing = d - s.degree();
    if (s.degree() >= 1) out = roots_to_points(poly_roots(s));
    if (missing > 0) out.emplace_back(SpherePoint::infinity(), missing);
    return out;
}

CriticalSet critical_points(const RationalMap& f) {
    CriticalSet cs;
    const Polynomial& w = f.wronskian();
    if (w.is_zero()) throw NumericError("critical_points: vanishing Wronskian");
    if (w.degree() >= 1) {
        for (const auto& r : poly_roots(w))
            cs.entries.push_back({SpherePoint(r.value), r.multiplicity + 1, true, false, false});
    }
    int deficit = (2 * f.degree() - 2) - w.degree();
    if (deficit > 0)
        cs.entries.push_back({SpherePoint::infinity(), deficit + 1, true, false, false});
    return cs;
}

namespace {

double polynomial_escape_radius(const RationalMap& f) {
    // |z| above this bound guarantees |f(z)| >= 2|z| for f = P/q0.
    const auto& c = f.numerator().coeffs();
    double lead = std::abs(c.back());
    double q0 = std::abs(f.denominator()(Complex(0, 0)));
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) sum += std::abs(c[i]);
    return std::max(2.0, (2.0 * q0 + sum) / lead);
}

} // namespace

CriticalSet julia_classify(const RationalMap& f, CriticalSet cs, int horizon,
                           std::span<const JuliaOverride> overrides) {
    if (horizon < 1) throw DomainError("julia_classify: horizon >= 1 required");
    const bool poly = f.is_polynomial();
    const double escape = poly ? polynomial_escape_radius(f) : 0.0;
    const int max_period = 64;

    for (auto& entry : cs.entries) {
        bool overridden = false;
        for (const auto& ov : overrides) {
            if (chordal_dist(ov.point, entry.point) < 1e-9) {
                entry.in_julia = ov.in_julia;
                entry.classified = true;
                entry.warning = false;
                overridden = true;
                break;
            }
        }
        if (overridden) continue;

        std::vector<SpherePoint> orbit{entry.point};
        bool decided = false;
        for (int k = 1; k <= horizon && !decided; ++k) {
            orbit.push_back(eval(f, orbit.back()));
            const SpherePoint& z = orbit.back();
            if (poly) {
                if (z.is_inf() || std::abs(z.value()) > escape) {
                    entry.in_julia = false;
                    entry.warning = false;
                    decided = true;
                    break;
                }
            }
            for (int p = 1; p <= std::min(max_period, k); ++p) {
                if (chordal_dist(orbit[k], orbit[k - p]) >= 1e-9) continue;
                double logm = 0.0;
                for (int j = k - p; j < k; ++j) {
                    double s = spherical_deriv(f, orbit[j]);
                    logm += (s > 0.0) ? std::log(s) : -std::numeric_limits<double>::infinity();
                }
                if (logm < std::log1p(-1e-9)) {
                    entry.in_julia = false;   // attracting or superattracting cycle
                    entry.warning = false;
                } else if (logm <= std::log1p(1e-6)) {
                    entry.in_julia = true;    // indifferent: undecidable here
                    entry.warning = true;
                } else {
                    entry.in_julia = true;    // lands on a repelling cycle
                    entry.warning = false;
                }
                decided = true;
                break;
            }
        }
        if (!decided) {
            entry.in_julia = true;
            entry.warning = true;
        }
        entry.classified = true;
    }
    return cs;
}

std::vector<std::pair<SpherePoint, double>> fixed_points(const RationalMap& f) {
    // Roots of P(z) - z Q(z); infinity is fixed when deg P > deg Q.
    Polynomial shift{std::vector<Complex>{Complex(0, 0), Complex(1, 0)}};
    Polynomial g = (f.numerator() - shift * f.denominator()).trimmed(1e-12);
    std::vector<std::pair<SpherePoint, double>> out;
    if (!g.is_zero() && g.degree() >= 1) {
        for (const auto& r : poly_roots(g)) {
            SpherePoint p(r.value);
            out.emplace_back(p, spherical_deriv(f, p));
        }
    }
    if (f.numerator().degree() > f.denominator().degree()) {
        SpherePoint inf = SpherePoint::infinity();
        out.emplace_back(inf, spherical_deriv(f, inf));
    }
    return out;
}

RationalMap compose(const RationalMap& f, const RationalMap& g) {
    const int df = f.degree();
    const auto& a = g.numerator();
    const auto& b = g.denominator();
    // P(A/B) B^df and Q(A/B) B^df
    std::vector<Polynomial> apow(df + 1), bpow(df + 1);
    apow[0] = Polynomial{std::vector<Complex>{Complex(1, 0)}};
    bpow[0] = apow[0];
    for (int i = 1; i <= df; ++i) {
        apow[i] = apow[i - 1] * a;
        bpow[i] = bpow[i - 1] * b;
    }
    Polynomial num, den;
    const auto& pc = f.numerator().coeffs();
    const auto& qc = f.denominator().coeffs();
    for (int i = 0; i <= df; ++i) {
        if (i < static_cast<int>(pc.size()) && pc[i] != Complex(0, 0))
            num = num + apow[i] * bpow[df - i] * pc[i];
        if (i < static_cast<int>(qc.size()) && qc[i] != Complex(0, 0))
            den = den + apow[i] * bpow[df - i] * qc[i];
    }
    return RationalMap(num.trimmed(1e-14), den.trimmed(1e-14));
}

} // namespace celab
