#include "motionforge/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace motionforge {

bool is_displacement(const DualQuaternion& h, double tol) {
    return h.p.norm_sq() > tol && std::abs(study_residual(h)) <= tol;
}

Vec3 dq_act(const DualQuaternion& h, const Vec3& pt, double tol) {
    const double delta = h.p.norm_sq();
    if (delta <= tol) {
        throw ZeroPrimal("dq_act: primal norm " + std::to_string(delta) +
                         " below tolerance (point of the exceptional generator)");
    }
    const Quaternion x = Quaternion::from_vector(pt);
    const Quaternion y = h.p * conj(h.q) - h.q * conj(h.p) + h.p * x * conj(h.p);
    return {y.x / delta, y.y / delta, y.z / delta};
}

DualQuaternion dq_normalize(const DualQuaternion& h, double tol) {
    const double delta = h.p.norm_sq();
    if (delta <= tol) {
        throw ZeroPrimal("dq_normalize: primal norm below tolerance");
    }
    return (1.0 / std::sqrt(delta)) * h;
}

double projective_distance(const DualQuaternion& a, const DualQuaternion& b) {
    const double na = std::sqrt(a.norm_sq_total());
    const double nb = std::sqrt(b.norm_sq_total());
    if (na == 0.0 || nb == 0.0) return (na == nb) ? 0.0 : 1.0;
    const auto ca = a.coords();
    const auto cb = b.coords();
    double plus = 0, minus = 0;
    for (int i = 0; i < 8; ++i) {
        const double u = ca[i] / na;
        const double v = cb[i] / nb;
        plus += (u - v) * (u - v);
        minus += (u + v) * (u + v);
    }
    return std::sqrt(std::min(plus, minus));
}

int DualQuatPoly::degree(double rel_tol) const {
    const double scale = max_coeff_norm();
    if (scale == 0.0) return -1;
    for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i) {
        if (std::sqrt(coeffs_[static_cast<std::size_t>(i)].norm_sq_total()) > rel_tol * scale) {
            return i;
        }
    }
    return -1;
}

DualQuaternion DualQuatPoly::eval(double t) const {
    DualQuaternion acc;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = t * acc + *it;
    }
    return acc;
}

DualQuatPoly DualQuatPoly::conjugated() const {
    std::vector<DualQuaternion> out;
    out.reserve(coeffs_.size());
    for (const auto& c : coeffs_) out.push_back(conj(c));
    return DualQuatPoly(std::move(out));
}

DualQuatPoly DualQuatPoly::derivative() const {
    if (coeffs_.size() <= 1) return DualQuatPoly({DualQuaternion{}});
    std::vector<DualQuaternion> out;
    out.reserve(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) {
        out.push_back(static_cast<double>(i) * coeffs_[i]);
    }
    return DualQuatPoly(std::move(out));
}

double DualQuatPoly::max_coeff_norm() const {
    double m = 0;
    for (const auto& c : coeffs_) m = std::max(m, std::sqrt(c.norm_sq_total()));
    return m;
}

DualQuatPoly operator+(const DualQuatPoly& f, const DualQuatPoly& g) {
    std::vector<DualQuaternion> out(std::max(f.size(), g.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (i < f.size()) out[i] = out[i] + f[i];
        if (i < g.size()) out[i] = out[i] + g[i];
    }
    return DualQuatPoly(std::move(out));
}

DualQuatPoly operator-(const DualQuatPoly& f, const DualQuatPoly& g) {
    return f + (-1.0) * g;
}

DualQuatPoly operator*(const DualQuatPoly& f, const DualQuatPoly& g) {
    if (f.empty() || g.empty()) return {};
    std::vector<DualQuaternion> out(f.size() + g.size() - 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            out[i + j] = out[i + j] + f[i] * g[j];
        }
    }
    return DualQuatPoly(std::move(out));
}

DualQuatPoly operator*(double s, const DualQuatPoly& f) {
    std::vector<DualQuaternion> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out.push_back(s * f[i]);
    return DualQuatPoly(std::move(out));
}

DualQuatPoly operator*(const DualQuaternion& c, const DualQuatPoly& f) {
    std::vector<DualQuaternion> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out.push_back(c * f[i]);
    return DualQuatPoly(std::move(out));
}

DualQuatPoly operator*(const DualQuatPoly& f, const DualQuaternion& c) {
    std::vector<DualQuaternion> out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out.push_back(f[i] * c);
    return DualQuatPoly(std::move(out));
}

DualQuaternion poly_eval(const DualQuatPoly& f, double t) { return f.eval(t); }

DualQuatPoly poly_mul(const DualQuatPoly& f, const DualQuatPoly& g) { return f * g; }

bool projectively_equal(const DualQuatPoly& f, const DualQuatPoly& g, double tol) {
    const double sf = f.max_coeff_norm();
    const double sg = g.max_coeff_norm();
    if (sf == 0.0 || sg == 0.0) return sf == sg;

    // Find the scale from the largest coefficient of f, then compare all.
    std::size_t ref = 0;
    double best = -1;
    const std::size_t n = std::max(f.size(), g.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = std::sqrt(f[i].norm_sq_total());
        if (v > best) { best = v; ref = i; }
    }
    if (ref >= g.size()) return false;
    const auto cf = f[ref].coords();
    const auto cg = g[ref].coords();
    int k = 0;
    for (int i = 1; i < 8; ++i) {
        if (std::abs(cf[i]) > std::abs(cf[k])) k = i;
    }
    if (cf[k] == 0.0) return false;
    const double s = cg[k] / cf[k];

    for (std::size_t i = 0; i < n; ++i) {
        const DualQuaternion a = (i < f.size()) ? f[i] : DualQuaternion{};
        const DualQuaternion b = (i < g.size()) ? g[i] : DualQuaternion{};
        const DualQuaternion diff = b - s * a;
        if (std::sqrt(diff.norm_sq_total()) > tol * std::max({1.0, sg, std::abs(s) * sf})) {
            return false;
        }
    }
    return true;
}

}  // namespace motionforge
