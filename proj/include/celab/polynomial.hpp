#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "celab/errors.hpp"

namespace celab {

using Complex = std::complex<double>;

/// Dense complex polynomial, coefficients in ascending degree order.
/// Leading zeros are trimmed; the zero polynomial is the single coefficient 0.
class Polynomial {
public:
    Polynomial() : coeffs_{Complex(0, 0)} {}
    explicit Polynomial(std::vector<Complex> coeffs);

    static Polynomial from_roots(std::span<const Complex> roots, Complex leading = Complex(1, 0));

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex(0, 0); }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    Complex leading() const { return coeffs_.back(); }
    double coeff_scale() const;

    Complex operator()(Complex z) const;
    // Value and derivative in one Horner pass.
    std::pair<Complex, Complex> eval_with_derivative(Complex z) const;

    Polynomial derivative() const;
    // w^pad_degree * p(1/w): the chart-swapped polynomial, padded to the given degree.
    Polynomial reversed(int pad_degree) const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(Complex s) const;

    // Drops leading coefficients below rel_tol * coeff_scale().
    Polynomial trimmed(double rel_tol) const;

private:
    std::vector<Complex> coeffs_;
};

struct Root {
    Complex value;
    int multiplicity;
};

struct RootOptions {
    int max_iterations = 200;
    double cluster_tol = 1e-8;
};

/// Non-convergence diagnostics carry the partial root estimates.
class RootsError : public NumericError {
public:
    RootsError(const std::string& msg, std::vector<Root> partial)
        : NumericError(msg), partial_roots(std::move(partial)) {}
    std::vector<Root> partial_roots;
};

/// All roots with multiplicity, Aberth-Ehrlich simultaneous iteration with
/// Newton polishing; clusters closer than cluster_tol are merged. Result is
/// sorted by (re, im). Throws DomainError for constant polynomials and
/// RootsError when the iteration cap is hit.
std::vector<Root> poly_roots(const Polynomial& p, RootOptions opts = {});

} // namespace celab
