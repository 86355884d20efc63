#pragma once

#include <array>
#include <cstddef>

#include "motionforge/algebra.hpp"

namespace motionforge {

// ---------------------------------------------------------------------------
// Affine model: pose as (A, a) with A special orthogonal; row-major storage.
// ---------------------------------------------------------------------------
struct PoseMatrix {
    std::array<double, 9> linear{1, 0, 0, 0, 1, 0, 0, 0, 1};
    Vec3 translation{0, 0, 0};

    static PoseMatrix identity() { return {}; }
    // Rotation by phi about the third coordinate axis plus translation d along it.
    static PoseMatrix cylinder_pose(double phi, double d);
    // From orthonormal column vectors and an origin.
    static PoseMatrix from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2, const Vec3& origin);

    double at(int row, int col) const { return linear[static_cast<std::size_t>(3 * row + col)]; }
    double& at(int row, int col) { return linear[static_cast<std::size_t>(3 * row + col)]; }

    Vec3 rotate(const Vec3& v) const;
    Vec3 apply(const Vec3& pt) const { return rotate(pt) + translation; }
    Vec3 column(int j) const { return {at(0, j), at(1, j), at(2, j)}; }

    PoseMatrix inverse() const;
};

// Composition: (this * other).apply(x) == this.apply(other.apply(x)).
PoseMatrix operator*(const PoseMatrix& a, const PoseMatrix& b);

// Largest absolute entry difference over rotation and translation.
double pose_distance(const PoseMatrix& a, const PoseMatrix& b);

struct PoseValidation {
    double max_orthogonality_residual = 0;  // max |(A A^T - I)_ij|
    double det_deviation = 0;               // det A - 1
    bool ok(double tol = kDefaultTolerance) const {
        return max_orthogonality_residual <= tol && std::abs(det_deviation) <= tol;
    }
};

PoseValidation validate_pose(const PoseMatrix& pose);

// ---------------------------------------------------------------------------
// Ambient model: a point of R^13 / P^12. Coordinates
//   [x0 | x1..x9 (row-major linear part) | a1,a2,a3].
// Affine poses live on the chart x0 = 1; everything else is a legal point too.
// ---------------------------------------------------------------------------
struct AmbientPose {
    std::array<double, 13> c{};

    AmbientPose() = default;
    explicit AmbientPose(const std::array<double, 13>& coords) : c(coords) {}
    static AmbientPose embed(const PoseMatrix& pose);

    double x0() const { return c[0]; }
    std::array<double, 10> rotational() const;
    Vec3 translational() const { return {c[10], c[11], c[12]}; }

    // Dehomogenize and validate; throws InvalidPose.
    PoseMatrix restrict_to_pose(double tol = kDefaultTolerance) const;

    double max_abs() const;
};

AmbientPose operator+(const AmbientPose& a, const AmbientPose& b);
AmbientPose operator-(const AmbientPose& a, const AmbientPose& b);
AmbientPose operator*(double s, const AmbientPose& a);

// ---------------------------------------------------------------------------
// Euler parameter extraction.
// ---------------------------------------------------------------------------

// The four linear forms that produce the candidate Euler parameter tuples from
// a homogenized 10-vector (x0 playing the role of the "1"). This is the single
// implementation; the extended map family reuses it.
std::array<double, 4> euler_form(int ell, const std::array<double, 10>& x);

struct EulerRatios {
    std::array<std::array<double, 4>, 4> tuple;  // one candidate per ell = 0..3

    // Index of the tuple with the largest Euclidean norm.
    int best_index() const;
};

// All four candidate tuples for an arbitrary ambient point; throws AllZero if
// every tuple vanishes (possible only for non-orthogonal input).
EulerRatios euler_ratios(const AmbientPose& x);

// ---------------------------------------------------------------------------
// Conversions.
// ---------------------------------------------------------------------------

// q = (1/2) Q(a) p; skew-symmetry of Q makes <p, q> = 0 exactly, so the result
// always satisfies the Study condition. No normalization of p is applied.
Quaternion dual_from_primal(const Quaternion& p, const Vec3& a);

// Displacement of any dual quaternion with nonzero primal norm (the extended
// conversion; the Study condition is not required).
PoseMatrix dq_to_matrix_extended(const DualQuaternion& h, double tol = kDefaultTolerance);

// Checked conversion for genuine Study representatives. Throws ZeroPrimal or
// StudyViolation (residual measured relative to the primal norm).
PoseMatrix dq_to_matrix(const DualQuaternion& h, double tol = kDefaultTolerance);

struct StudyConversion {
    DualQuaternion h;   // unit primal norm, largest primal entry positive
    int ratio_index;    // which tuple of euler_ratios was used
};

// Inverse conversion, picking the best-conditioned Euler ratio tuple.
StudyConversion matrix_to_dq_detail(const PoseMatrix& pose, double tol = kDefaultTolerance);
DualQuaternion matrix_to_dq(const PoseMatrix& pose, double tol = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Fibers of the extended dual quaternion model: the preimage of the
// displacement of h is the line spanned by h and eps * (primal of h).
// ---------------------------------------------------------------------------
struct FiberLine {
    DualQuaternion base;
    DualQuaternion direction;  // a pure eps element

    DualQuaternion at(double s) const { return base + s * direction; }
};

FiberLine study_fiber(const DualQuaternion& h, double tol = kDefaultTolerance);

}  // namespace motionforge
