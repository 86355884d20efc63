#pragma once

#include <complex>
#include <vector>

namespace motionforge {

// Real univariate polynomial, coefficients ascending. Small utility layer for
// trajectory reduction and root scanning; not part of the public motion API.
class RealPoly {
public:
    RealPoly() = default;
    explicit RealPoly(std::vector<double> coeffs) : c_(std::move(coeffs)) {}

    const std::vector<double>& coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }
    bool empty() const { return c_.empty(); }
    double operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

    int degree(double rel_tol = 1e-12) const;
    double eval(double t) const;
    std::complex<double> eval(const std::complex<double>& t) const;
    double max_abs_coeff() const;

    RealPoly derivative() const;
    // Drop leading coefficients that are negligible relative to the largest.
    RealPoly trimmed(double rel_tol = 1e-12) const;

private:
    std::vector<double> c_;
};

RealPoly operator+(const RealPoly& f, const RealPoly& g);
RealPoly operator-(const RealPoly& f, const RealPoly& g);
RealPoly operator*(const RealPoly& f, const RealPoly& g);
RealPoly operator*(double s, const RealPoly& f);

// Quotient and remainder of f / g (g trimmed first); throws on zero divisor.
struct PolyDivision {
    RealPoly quotient;
    RealPoly remainder;
};
PolyDivision poly_divide(const RealPoly& f, const RealPoly& g, double rel_tol = 1e-12);

// All complex roots via the companion-matrix eigenvalues of the trimmed polynomial.
std::vector<std::complex<double>> poly_roots(const RealPoly& f, double rel_tol = 1e-12);

// Real roots inside [lo, hi] (imaginary part below tol relative to scale).
std::vector<double> real_roots_in(const RealPoly& f, double lo, double hi, double tol = 1e-9);

}  // namespace motionforge
