#include "celab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace celab {

namespace {

bool coeff_is_negligible(Complex c, double scale, double rel_tol) {
    return std::abs(c) <= rel_tol * scale;
}

} // namespace

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw DomainError("Polynomial: empty coefficient list");
    for (Complex c : coeffs_) {
        if (std::isnan(c.real()) || std::isnan(c.imag()) || std::isinf(c.real()) ||
            std::isinf(c.imag()))
            throw DomainError("Polynomial: coefficients must be finite");
    }
    while (coeffs_.size() > 1 && coeffs_.back() == Complex(0, 0)) coeffs_.pop_back();
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots, Complex leading) {
    std::vector<Complex> c{leading};
    for (Complex r : roots) {
        c.push_back(Complex(0, 0));
        for (std::size_t i = c.size() - 1; i > 0; --i) c[i] = c[i - 1] - r * c[i];
        c[0] = -r * c[0];
    }
    return Polynomial(std::move(c));
}

double Polynomial::coeff_scale() const {
    double s = 0.0;
    for (Complex c : coeffs_) s = std::max(s, std::abs(c));
    return s;
}

Complex Polynomial::operator()(Complex z) const {
    Complex v(0, 0);
    for (std::size_t i = coeffs_.size(); i-- > 0;) v = v * z + coeffs_[i];
    return v;
}

std::pair<Complex, Complex> Polynomial::eval_with_derivative(Complex z) const {
    Complex v(0, 0), d(0, 0);
    for (std::size_t i = coeffs_.size(); i-- > 0;) {
        d = d * z + v;
        v = v * z + coeffs_[i];
    }
    return {v, d};
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() == 1) return Polynomial();
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * double(i);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::reversed(int pad_degree) const {
    if (pad_degree < degree()) throw DomainError("Polynomial::reversed: pad below degree");
    std::vector<Complex> r(static_cast<std::size_t>(pad_degree) + 1, Complex(0, 0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r[pad_degree - i] = coeffs_[i];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::vector<Complex> r(std::max(coeffs_.size(), o.coeffs_.size()), Complex(0, 0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r[i] += coeffs_[i];
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) r[i] += o.coeffs_[i];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    std::vector<Complex> r(std::max(coeffs_.size(), o.coeffs_.size()), Complex(0, 0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) r[i] += coeffs_[i];
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i) r[i] -= o.coeffs_[i];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    if (is_zero() || o.is_zero()) return Polynomial();
    std::vector<Complex> r(coeffs_.size() + o.coeffs_.size() - 1, Complex(0, 0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
    return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(Complex s) const {
    std::vector<Complex> r = coeffs_;
    for (Complex& c : r) c *= s;
    return Polynomial(std::move(r));
}

Polynomial Polynomial::trimmed(double rel_tol) const {
    double scale = coeff_scale();
    std::vector<Complex> r = coeffs_;
    while (r.size() > 1 && coeff_is_negligible(r.back(), scale, rel_tol)) r.pop_back();
    return Polynomial(std::move(r));
}

namespace {

// Backward-stable residual bound: |p(z)| below this is numerically a root.
double residual_bound(const std::vector<Complex>& coeffs, Complex z) {
    double az = std::abs(z);
    double bound = 0.0;
    double zp = 1.0;
    for (const Complex& c : coeffs) {
        bound += std::abs(c) * zp;
        zp *= az;
    }
    return bound * 4.0 * std::numeric_limits<double>::epsilon() *
           static_cast<double>(coeffs.size());
}

Complex newton_polish(const Polynomial& p, Complex z, int iters) {
    for (int i = 0; i < iters; ++i) {
        auto [v, d] = p.eval_with_derivative(z);
        if (std::abs(d) == 0.0) break;
        Complex step = v / d;
        z -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
}

std::vector<Root> cluster_and_polish(const Polynomial& p, std::vector<Complex> pts,
                                     double cluster_tol) {
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    // Greedy union of points within cluster_tol (relative to cluster magnitude).
    std::vector<std::vector<Complex>> clusters;
    std::vector<char> used(pts.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (used[i]) continue;
        std::vector<Complex> cl{pts[i]};
        used[i] = 1;
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                if (used[j]) continue;
                for (Complex c : cl) {
                    if (std::abs(pts[j] - c) < cluster_tol * std::max(1.0, std::abs(c))) {
                        cl.push_back(pts[j]);
                        used[j] = 1;
                        grew = true;
                        break;
                    }
                }
            }
        }
        clusters.push_back(std::move(cl));
    }

    std::vector<Root> roots;
    for (auto& cl : clusters) {
        Complex centroid(0, 0);
        for (Complex c : cl) centroid += c;
        centroid /= double(cl.size());
        int m = static_cast<int>(cl.size());
        Complex refined = centroid;
        if (m == 1) {
            refined = newton_polish(p, centroid, 3);
        } else {
            // A root of multiplicity m is a simple root of the (m-1)-th derivative.
            Polynomial q = p;
            for (int k = 0; k < m - 1; ++k) q = q.derivative();
            refined = newton_polish(q, centroid, 6);
        }
        roots.push_back({refined, m});
    }
    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    return roots;
}

} // namespace

std::vector<Root> poly_roots(const Polynomial& p, RootOptions opts) {
    if (p.is_zero()) throw DomainError("poly_roots: zero polynomial");
    if (p.degree() < 1) throw DomainError("poly_roots: constant polynomial has no roots");

    // Factor out roots at the origin.
    const auto& raw = p.coeffs();
    double scale = p.coeff_scale();
    std::size_t zero_mult = 0;
    while (zero_mult < raw.size() - 1 &&
           coeff_is_negligible(raw[zero_mult], scale, 1e-14))
        ++zero_mult;
    std::vector<Complex> work(raw.begin() + zero_mult, raw.end());

    std::vector<Complex> pts;
    int n = static_cast<int>(work.size()) - 1;
    if (n > 0) {
        // Normalize to a monic-ish scale for conditioning.
        Complex lead = work.back();
        for (Complex& c : work) c /= lead;
        Polynomial q{std::vector<Complex>(work)};

        if (n == 1) {
            pts.push_back(-work[0]);
        } else if (n == 2) {
            // Numerically stable quadratic formula.
            Complex b = work[1], c0 = work[0];
            Complex disc = std::sqrt(b * b - 4.0 * c0);
            Complex s = (std::real(std::conj(b) * disc) >= 0.0) ? b + disc : b - disc;
            if (std::abs(s) == 0.0) {
                Complex r = std::sqrt(-c0);
                pts.push_back(r);
                pts.push_back(-r);
            } else {
                pts.push_back(-s / 2.0);
                pts.push_back(-2.0 * c0 / s);
            }
        } else {
            // Aberth-Ehrlich from staggered circles.
            double cauchy = 0.0;
            for (int i = 0; i < n; ++i) cauchy = std::max(cauchy, std::abs(work[i]));
            double radius_hi = 1.0 + cauchy;
            double radius_lo = std::pow(std::max(std::abs(work[0]), 1e-12), 1.0 / n);
            radius_lo = std::min(std::max(radius_lo, 1e-3), radius_hi);
            std::vector<Complex> z(n);
            for (int i = 0; i < n; ++i) {
                double t = (double(i) + 0.5) / n;
                double r = radius_lo + (radius_hi - radius_lo) * (i % 2 ? 0.35 : 0.0);
                double ang = 2.0 * std::numbers::pi * t + 0.4;
                z[i] = Complex(r * std::cos(ang), r * std::sin(ang));
            }
            std::vector<char> done(n, 0);
            bool converged = false;
            for (int iter = 0; iter < opts.max_iterations && !converged; ++iter) {
                converged = true;
                for (int i = 0; i < n; ++i) {
                    if (done[i]) continue;
                    auto [v, d] = q.eval_with_derivative(z[i]);
                    if (std::abs(v) <= residual_bound(q.coeffs(), z[i])) {
                        done[i] = 1;
                        continue;
                    }
                    Complex newton;
                    if (std::abs(d) == 0.0) {
                        newton = Complex(1e-8, 1e-8);
                    } else {
                        newton = v / d;
                    }
                    Complex sum(0, 0);
                    for (int j = 0; j < n; ++j) {
                        if (j == i) continue;
                        Complex diff = z[i] - z[j];
                        if (std::abs(diff) < 1e-300) diff = Complex(1e-300, 0);
                        sum += 1.0 / diff;
                    }
                    Complex denom = 1.0 - newton * sum;
                    Complex step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
                    z[i] -= step;
                    if (std::abs(step) > 1e-14 * (1.0 + std::abs(z[i]))) converged = false;
                }
            }
            if (!converged) {
                bool all_done = true;
                for (int i = 0; i < n; ++i)
                    if (!done[i]) all_done = false;
                if (!all_done) {
                    std::vector<Root> partial;
                    for (Complex zz : z) partial.push_back({zz, 1});
                    throw RootsError("poly_roots: Aberth iteration did not converge", partial);
                }
            }
            pts = z;
        }
    }

    Polynomial trimmed_p{std::vector<Complex>(raw.begin() + zero_mult, raw.end())};
    std::vector<Root> roots =
        n > 0 ? cluster_and_polish(trimmed_p, pts, opts.cluster_tol) : std::vector<Root>{};
    if (zero_mult > 0) {
        roots.push_back({Complex(0, 0), static_cast<int>(zero_mult)});
        std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
            if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
            return a.value.imag() < b.value.imag();
        });
    }
    return roots;
}

} // namespace celab
