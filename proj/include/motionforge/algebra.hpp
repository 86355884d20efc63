#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "motionforge/errors.hpp"

namespace motionforge {

// One absolute tolerance for all "is this zero" decisions (overridable per call).
inline constexpr double kDefaultTolerance = 1e-9;

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// ---------------------------------------------------------------------------
// Quaternion p = w + x i + y j + z k,  i^2 = j^2 = k^2 = ijk = -1.
// ---------------------------------------------------------------------------
struct Quaternion {
    double w = 0, x = 0, y = 0, z = 0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion identity() { return {1, 0, 0, 0}; }
    static constexpr Quaternion from_vector(const Vec3& v) { return {0, v[0], v[1], v[2]}; }

    Vec3 vec() const { return {x, y, z}; }
    double norm_sq() const { return w * w + x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_sq()); }
};

inline Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}
inline Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}
inline Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
inline Quaternion operator*(double s, const Quaternion& a) { return {s * a.w, s * a.x, s * a.y, s * a.z}; }
inline Quaternion operator*(const Quaternion& a, double s) { return s * a; }

inline Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Quaternion conj(const Quaternion& a) { return {a.w, -a.x, -a.y, -a.z}; }
inline double dot(const Quaternion& a, const Quaternion& b) {
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

// ---------------------------------------------------------------------------
// Dual number s + eps t, eps^2 = 0.
// ---------------------------------------------------------------------------
struct DualNumber {
    double primal = 0, dual = 0;
};

inline DualNumber operator+(const DualNumber& a, const DualNumber& b) {
    return {a.primal + b.primal, a.dual + b.dual};
}
inline DualNumber operator*(const DualNumber& a, const DualNumber& b) {
    return {a.primal * b.primal, a.primal * b.dual + a.dual * b.primal};
}

// ---------------------------------------------------------------------------
// Dual quaternion h = p + eps q.
// ---------------------------------------------------------------------------
struct DualQuaternion {
    Quaternion p;  // primal part
    Quaternion q;  // dual part

    constexpr DualQuaternion() = default;
    constexpr DualQuaternion(const Quaternion& p_, const Quaternion& q_ = {}) : p(p_), q(q_) {}

    static constexpr DualQuaternion identity() { return {Quaternion::identity(), {}}; }

    // Study parameter vector [p0,p1,p2,p3,q0,q1,q2,q3].
    std::array<double, 8> coords() const { return {p.w, p.x, p.y, p.z, q.w, q.x, q.y, q.z}; }
    static DualQuaternion from_coords(const std::array<double, 8>& c) {
        return {{c[0], c[1], c[2], c[3]}, {c[4], c[5], c[6], c[7]}};
    }

    double norm_sq_total() const { return p.norm_sq() + q.norm_sq(); }
};

inline DualQuaternion operator+(const DualQuaternion& a, const DualQuaternion& b) {
    return {a.p + b.p, a.q + b.q};
}
inline DualQuaternion operator-(const DualQuaternion& a, const DualQuaternion& b) {
    return {a.p - b.p, a.q - b.q};
}
inline DualQuaternion operator-(const DualQuaternion& a) { return {-a.p, -a.q}; }
inline DualQuaternion operator*(double s, const DualQuaternion& a) { return {s * a.p, s * a.q}; }
inline DualQuaternion operator*(const DualQuaternion& a, double s) { return s * a; }

inline DualQuaternion operator*(const DualQuaternion& a, const DualQuaternion& b) {
    return {a.p * b.p, a.p * b.q + a.q * b.p};
}

inline DualQuaternion conj(const DualQuaternion& h) { return {conj(h.p), conj(h.q)}; }

// h * conj(h); the dual part is always real (it equals 2 <p,q>).
inline DualNumber dq_norm(const DualQuaternion& h) {
    return {h.p.norm_sq(), 2.0 * dot(h.p, h.q)};
}

// Residual of the Study condition p qbar + q pbar = 0 (the dual part of the norm).
inline double study_residual(const DualQuaternion& h) { return 2.0 * dot(h.p, h.q); }

bool is_displacement(const DualQuaternion& h, double tol = kDefaultTolerance);

// Displacement action on a point. Works for any dual quaternion with nonzero
// primal norm, on or off the Study quadric (the extended action: the primal
// rotates, (p qbar - q pbar)/Delta translates).
Vec3 dq_act(const DualQuaternion& h, const Vec3& pt, double tol = kDefaultTolerance);

// Divides by the square root of the primal norm. Never applied implicitly.
DualQuaternion dq_normalize(const DualQuaternion& h, double tol = kDefaultTolerance);

// Smallest representative-independent distance of two nonzero 8-vectors.
double projective_distance(const DualQuaternion& a, const DualQuaternion& b);

// ---------------------------------------------------------------------------
// Polynomials over the dual quaternions. The indeterminate t is a real motion
// parameter and commutes with the coefficients; coefficients are stored in
// ascending degree.
// ---------------------------------------------------------------------------
class DualQuatPoly {
public:
    DualQuatPoly() = default;
    explicit DualQuatPoly(std::vector<DualQuaternion> coeffs) : coeffs_(std::move(coeffs)) {}

    static DualQuatPoly constant(const DualQuaternion& c) { return DualQuatPoly({c}); }
    // (b - a) t + a, the segment from a to b.
    static DualQuatPoly line(const DualQuaternion& a, const DualQuaternion& b) {
        return DualQuatPoly({a, b - a});
    }

    const std::vector<DualQuaternion>& coeffs() const { return coeffs_; }
    std::size_t size() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }
    const DualQuaternion& operator[](std::size_t i) const { return coeffs_[i]; }
    DualQuaternion& operator[](std::size_t i) { return coeffs_[i]; }

    // Degree after trimming coefficients that are negligible relative to the
    // largest one; -1 for the zero polynomial.
    int degree(double rel_tol = 1e-12) const;

    DualQuaternion eval(double t) const;

    DualQuatPoly conjugated() const;   // coefficientwise dual quaternion conjugate
    DualQuatPoly derivative() const;

    // Largest coefficient magnitude (max over coefficients of the 8-vector norm).
    double max_coeff_norm() const;

private:
    std::vector<DualQuaternion> coeffs_;
};

DualQuatPoly operator+(const DualQuatPoly& f, const DualQuatPoly& g);
DualQuatPoly operator-(const DualQuatPoly& f, const DualQuatPoly& g);
DualQuatPoly operator*(const DualQuatPoly& f, const DualQuatPoly& g);
DualQuatPoly operator*(double s, const DualQuatPoly& f);
DualQuatPoly operator*(const DualQuaternion& c, const DualQuatPoly& f);  // left multiply
DualQuatPoly operator*(const DualQuatPoly& f, const DualQuaternion& c);  // right multiply

DualQuaternion poly_eval(const DualQuatPoly& f, double t);
DualQuatPoly poly_mul(const DualQuatPoly& f, const DualQuatPoly& g);

// True if g = s * f for one real s (coefficientwise), within tol relative to
// the larger coefficient scale.
bool projectively_equal(const DualQuatPoly& f, const DualQuatPoly& g, double tol = kDefaultTolerance);

}  // namespace motionforge
