#pragma once

#include <array>
#include <complex>

#include "celab/errors.hpp"

namespace celab {

using Complex = std::complex<double>;

class RationalMap;

/// A point of the Riemann sphere: a finite complex value or the point at infinity.
class SpherePoint {
public:
    SpherePoint() : value_(0.0, 0.0), inf_(false) {}
    SpherePoint(Complex v) : value_(v), inf_(false) {
        if (std::isnan(v.real()) || std::isnan(v.imag()))
            throw DomainError("SpherePoint: NaN is not a point of the sphere");
        if (std::isinf(v.real()) || std::isinf(v.imag())) {
            value_ = Complex(0.0, 0.0);
            inf_ = true;
        }
    }
    SpherePoint(double re, double im) : SpherePoint(Complex(re, im)) {}

    static SpherePoint infinity() {
        SpherePoint p;
        p.inf_ = true;
        return p;
    }

    bool is_inf() const { return inf_; }

    Complex value() const {
        if (inf_) throw DomainError("SpherePoint: value() called on the point at infinity");
        return value_;
    }

    // Finite value or 0 for infinity; callers must check is_inf() first.
    Complex value_or_zero() const { return inf_ ? Complex(0, 0) : value_; }

    bool operator==(const SpherePoint& o) const {
        return inf_ == o.inf_ && (inf_ || value_ == o.value_);
    }

private:
    Complex value_;
    bool inf_;
};

// Deterministic ordering: finite points by (re, im), infinity last.
bool sphere_less(const SpherePoint& a, const SpherePoint& b);

/// Chordal distance with the sphere normalized to diameter 2: sigma(0, inf) = 2.
double chordal_dist(const SpherePoint& a, const SpherePoint& b);

/// The antipode -1/conj(z); the unique point at chordal distance 2.
SpherePoint antipode(const SpherePoint& z);

/// Embedding into the unit sphere of R^3; chordal distance equals the
/// Euclidean distance between embedded points.
std::array<double, 3> embed3(const SpherePoint& z);

enum class Chart { standard, inverted };

/// Chart coordinate of a sphere point. Throws at the chart's pole.
Complex sphere_to_chart(const SpherePoint& z, Chart chart);
SpherePoint chart_to_sphere(Complex w, Chart chart);

/// Disk in chordal form. Radius in (0, 2]; radius 2 is the whole sphere.
struct ChordalDisk {
    SpherePoint center;
    double radius;

    ChordalDisk(SpherePoint c, double r) : center(c), radius(r) {
        if (!(r > 0.0) || r > 2.0)
            throw DomainError("ChordalDisk: radius must lie in (0, 2]");
    }
};

/// A chordal disk rendered as a Euclidean disk in one of the two charts.
struct ChartDisk {
    Complex center;
    double radius;
    Chart chart;
};

/// Exact chordal -> Euclidean conversion. Picks the chart whose pole lies
/// outside the disk so the image is a bounded Euclidean disk.
ChartDisk to_chart(const ChordalDisk& d);

/// Exact inverse of to_chart (the chordal disk equal to the chart disk as a point set).
ChordalDisk disk_from_chart(const ChartDisk& d);

/// |f'(z)| measured in the chordal metric; chart-independent, 0 at critical points.
double spherical_deriv(const RationalMap& f, const SpherePoint& z);

/// Same value computed in a forced chart; used to test chart invariance.
double spherical_deriv_in_chart(const RationalMap& f, const SpherePoint& z, Chart chart);

} // namespace celab
