#include "celab/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "celab/ratmap.hpp"

namespace celab {

bool sphere_less(const SpherePoint& a, const SpherePoint& b) {
    if (a.is_inf() != b.is_inf()) return b.is_inf();
    if (a.is_inf()) return false;
    if (a.value().real() != b.value().real()) return a.value().real() < b.value().real();
    return a.value().imag() < b.value().imag();
}

double chordal_dist(const SpherePoint& a, const SpherePoint& b) {
    if (a.is_inf() && b.is_inf()) return 0.0;
    if (a.is_inf()) return 2.0 / std::hypot(1.0, std::abs(b.value()));
    if (b.is_inf()) return 2.0 / std::hypot(1.0, std::abs(a.value()));
    Complex za = a.value(), zb = b.value();
    double ma = std::abs(za), mb = std::abs(zb);
    if (ma > 1.0 && mb > 1.0) {
        // Inversion is a chordal isometry; work with moduli <= 1.
        za = 1.0 / za;
        zb = 1.0 / zb;
        ma = std::abs(za);
        mb = std::abs(zb);
    }
    return 2.0 * std::abs(za - zb) / (std::hypot(1.0, ma) * std::hypot(1.0, mb));
}

SpherePoint antipode(const SpherePoint& z) {
    if (z.is_inf()) return SpherePoint(Complex(0, 0));
    Complex v = z.value();
    if (v == Complex(0, 0)) return SpherePoint::infinity();
    return SpherePoint(-1.0 / std::conj(v));
}

std::array<double, 3> embed3(const SpherePoint& z) {
    if (z.is_inf()) return {0.0, 0.0, 1.0};
    Complex v = z.value();
    double m = std::abs(v);
    if (m <= 1.0) {
        double s = 1.0 + m * m;
        return {2.0 * v.real() / s, 2.0 * v.imag() / s, (m * m - 1.0) / s};
    }
    // Evaluate through 1/z to avoid overflow for huge moduli.
    Complex w = 1.0 / v;
    double mw = std::abs(w);
    double s = 1.0 + mw * mw;
    return {2.0 * w.real() / s, -2.0 * w.imag() / s, (1.0 - mw * mw) / s};
}

Complex sphere_to_chart(const SpherePoint& z, Chart chart) {
    if (chart == Chart::standard) {
        if (z.is_inf()) throw DomainError("sphere_to_chart: infinity in standard chart");
        return z.value();
    }
    if (z.is_inf()) return Complex(0, 0);
    Complex v = z.value();
    if (v == Complex(0, 0)) throw DomainError("sphere_to_chart: origin in inverted chart");
    return 1.0 / v;
}

SpherePoint chart_to_sphere(Complex w, Chart chart) {
    if (chart == Chart::standard) return SpherePoint(w);
    if (w == Complex(0, 0)) return SpherePoint::infinity();
    return SpherePoint(1.0 / w);
}

namespace {

// Signed positions s1 < s2 of the chordal circle's diameter endpoints along the
// ray through the center; valid when the chart pole is outside the disk.
std::pair<double, double> radial_extremes(double rho, double r) {
    double beta = r * r * (1.0 + rho * rho) / 4.0;
    double disc = beta * (1.0 + rho * rho) * (1.0 - r * r / 4.0);
    double sq = std::sqrt(std::max(disc, 0.0));
    double denom = 1.0 - beta;
    double s1 = (rho - sq) / denom;
    double s2 = (rho + sq) / denom;
    return {s1, s2};
}

double sigma_on_ray(double s, double t) {
    return 2.0 * std::abs(s - t) / (std::hypot(1.0, s) * std::hypot(1.0, t));
}

} // namespace

ChartDisk to_chart(const ChordalDisk& d) {
    if (d.radius >= 2.0) throw DomainError("to_chart: disk is the whole sphere");
    const double margin = 1e-12;
    double dist_to_inf = chordal_dist(d.center, SpherePoint::infinity());
    double dist_to_zero = chordal_dist(d.center, SpherePoint(Complex(0, 0)));

    Chart chart;
    if (dist_to_inf > d.radius + margin)
        chart = Chart::standard;
    else if (dist_to_zero > d.radius + margin)
        chart = Chart::inverted;
    else
        throw DomainError("to_chart: disk covers both chart poles; no bounded chart image");

    Complex c = sphere_to_chart(d.center, chart);
    double rho = std::abs(c);
    auto [s1, s2] = radial_extremes(rho, d.radius);
    Complex dir = (rho == 0.0) ? Complex(1, 0) : c / rho;
    Complex euc_center = dir * ((s1 + s2) / 2.0);
    double euc_radius = (s2 - s1) / 2.0;
    return {euc_center, euc_radius, chart};
}

ChordalDisk disk_from_chart(const ChartDisk& d) {
    if (!(d.radius > 0.0)) throw DomainError("disk_from_chart: radius must be positive");
    double e = std::abs(d.center);
    double s1 = e - d.radius, s2 = e + d.radius;
    double h1 = std::hypot(1.0, s1), h2 = std::hypot(1.0, s2);
    double rho = (s1 * h2 + s2 * h1) / (h1 + h2);
    double radius = sigma_on_ray(rho, s2);
    Complex dir = (e == 0.0) ? Complex(1, 0) : d.center / e;
    return ChordalDisk(chart_to_sphere(dir * rho, d.chart), radius);
}

namespace {

// |W(z)| (1+|z|^2) / (|P(z)|^2 + |Q(z)|^2), globally valid for finite z.
double deriv_formula(const Polynomial& num, const Polynomial& den, const Polynomial& wr,
                     Complex z) {
    Complex p = num(z), q = den(z), w = wr(z);
    double denom = std::norm(p) + std::norm(q);
    if (denom == 0.0) return 0.0;
    double m = std::abs(z);
    return std::abs(w) * (1.0 + m * m) / denom;
}

} // namespace

double spherical_deriv_in_chart(const RationalMap& f, const SpherePoint& z, Chart chart) {
    if (chart == Chart::standard) {
        if (z.is_inf()) throw DomainError("spherical_deriv: infinity needs the inverted chart");
        return deriv_formula(f.numerator(), f.denominator(), f.wronskian(), z.value());
    }
    Complex w = sphere_to_chart(z, Chart::inverted);
    return deriv_formula(f.numerator_reversed(), f.denominator_reversed(),
                         f.wronskian_reversed(), w);
}

double spherical_deriv(const RationalMap& f, const SpherePoint& z) {
    if (z.is_inf() || std::abs(z.value()) > 1.0)
        return spherical_deriv_in_chart(f, z, Chart::inverted);
    return spherical_deriv_in_chart(f, z, Chart::standard);
}

} // namespace celab
