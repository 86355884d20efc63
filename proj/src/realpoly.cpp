#include "motionforge/realpoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace motionforge {

int RealPoly::degree(double rel_tol) const {
    const double scale = max_abs_coeff();
    if (scale == 0.0) return -1;
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) {
        if (std::abs(c_[static_cast<std::size_t>(i)]) > rel_tol * scale) return i;
    }
    return -1;
}

double RealPoly::eval(double t) const {
    double acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

std::complex<double> RealPoly::eval(const std::complex<double>& t) const {
    std::complex<double> acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double RealPoly::max_abs_coeff() const {
    double m = 0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

RealPoly RealPoly::derivative() const {
    if (c_.size() <= 1) return RealPoly({0.0});
    std::vector<double> out(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) out[i - 1] = static_cast<double>(i) * c_[i];
    return RealPoly(std::move(out));
}

RealPoly RealPoly::trimmed(double rel_tol) const {
    const int d = degree(rel_tol);
    if (d < 0) return RealPoly(std::vector<double>{});
    return RealPoly(std::vector<double>(c_.begin(), c_.begin() + d + 1));
}

RealPoly operator+(const RealPoly& f, const RealPoly& g) {
    std::vector<double> out(std::max(f.size(), g.size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] + g[i];
    return RealPoly(std::move(out));
}

RealPoly operator-(const RealPoly& f, const RealPoly& g) {
    std::vector<double> out(std::max(f.size(), g.size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] - g[i];
    return RealPoly(std::move(out));
}

RealPoly operator*(const RealPoly& f, const RealPoly& g) {
    if (f.empty() || g.empty()) return RealPoly(std::vector<double>{});
    std::vector<double> out(f.size() + g.size() - 1, 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) out[i + j] += f[i] * g[j];
    }
    return RealPoly(std::move(out));
}

RealPoly operator*(double s, const RealPoly& f) {
    std::vector<double> out(f.coeffs());
    for (double& v : out) v *= s;
    return RealPoly(std::move(out));
}

PolyDivision poly_divide(const RealPoly& f, const RealPoly& g, double rel_tol) {
    const RealPoly gt = g.trimmed(rel_tol);
    if (gt.empty()) throw std::invalid_argument("poly_divide: zero divisor");
    const int dg = static_cast<int>(gt.size()) - 1;
    std::vector<double> rem(f.coeffs());
    const int df = static_cast<int>(rem.size()) - 1;
    if (df < dg) return {RealPoly({0.0}), RealPoly(std::move(rem))};

    std::vector<double> quot(static_cast<std::size_t>(df - dg + 1), 0.0);
    const double lead = gt[static_cast<std::size_t>(dg)];
    for (int k = df - dg; k >= 0; --k) {
        const double q = rem[static_cast<std::size_t>(k + dg)] / lead;
        quot[static_cast<std::size_t>(k)] = q;
        for (int j = 0; j <= dg; ++j) {
            rem[static_cast<std::size_t>(k + j)] -= q * gt[static_cast<std::size_t>(j)];
        }
    }
    rem.resize(static_cast<std::size_t>(std::max(dg, 1)));
    return {RealPoly(std::move(quot)), RealPoly(std::move(rem))};
}

std::vector<std::complex<double>> poly_roots(const RealPoly& f, double rel_tol) {
    const RealPoly ft = f.trimmed(rel_tol);
    const int n = static_cast<int>(ft.size()) - 1;
    if (n <= 0) return {};
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    const double lead = ft[static_cast<std::size_t>(n)];
    for (int i = 0; i < n; ++i) {
        companion(i, n - 1) = -ft[static_cast<std::size_t>(i)] / lead;
        if (i > 0) companion(i, i - 1) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
    std::vector<std::complex<double>> roots;
    roots.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
    return roots;
}

std::vector<double> real_roots_in(const RealPoly& f, double lo, double hi, double tol) {
    std::vector<double> out;
    for (const auto& r : poly_roots(f)) {
        if (std::abs(r.imag()) <= tol * (1.0 + std::abs(r.real())) &&
            r.real() >= lo - tol && r.real() <= hi + tol) {
            out.push_back(std::clamp(r.real(), lo, hi));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace motionforge
