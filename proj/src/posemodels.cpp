#include "motionforge/posemodels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace motionforge {

PoseMatrix PoseMatrix::cylinder_pose(double phi, double d) {
    PoseMatrix out;
    const double c = std::cos(phi), s = std::sin(phi);
    out.linear = {c, -s, 0, s, c, 0, 0, 0, 1};
    out.translation = {0, 0, d};
    return out;
}

PoseMatrix PoseMatrix::from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2, const Vec3& origin) {
    PoseMatrix out;
    for (int i = 0; i < 3; ++i) {
        out.at(i, 0) = c0[static_cast<std::size_t>(i)];
        out.at(i, 1) = c1[static_cast<std::size_t>(i)];
        out.at(i, 2) = c2[static_cast<std::size_t>(i)];
    }
    out.translation = origin;
    return out;
}

Vec3 PoseMatrix::rotate(const Vec3& v) const {
    return {at(0, 0) * v[0] + at(0, 1) * v[1] + at(0, 2) * v[2],
            at(1, 0) * v[0] + at(1, 1) * v[1] + at(1, 2) * v[2],
            at(2, 0) * v[0] + at(2, 1) * v[1] + at(2, 2) * v[2]};
}

PoseMatrix PoseMatrix::inverse() const {
    PoseMatrix out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) out.at(i, j) = at(j, i);
    }
    out.translation = -out.rotate(translation);
    return out;
}

PoseMatrix operator*(const PoseMatrix& a, const PoseMatrix& b) {
    PoseMatrix out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += a.at(i, k) * b.at(k, j);
            out.at(i, j) = s;
        }
    }
    out.translation = a.apply(b.translation);
    return out;
}

double pose_distance(const PoseMatrix& a, const PoseMatrix& b) {
    double m = 0;
    for (int i = 0; i < 9; ++i) {
        m = std::max(m, std::abs(a.linear[static_cast<std::size_t>(i)] -
                                 b.linear[static_cast<std::size_t>(i)]));
    }
    for (int i = 0; i < 3; ++i) {
        m = std::max(m, std::abs(a.translation[static_cast<std::size_t>(i)] -
                                 b.translation[static_cast<std::size_t>(i)]));
    }
    return m;
}

PoseValidation validate_pose(const PoseMatrix& pose) {
    PoseValidation report;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int k = 0; k < 3; ++k) s += pose.at(i, k) * pose.at(j, k);
            if (i == j) s -= 1.0;
            report.max_orthogonality_residual = std::max(report.max_orthogonality_residual, std::abs(s));
        }
    }
    const auto& a = pose.linear;
    const double det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
                       a[2] * (a[3] * a[7] - a[4] * a[6]);
    report.det_deviation = det - 1.0;
    return report;
}

AmbientPose AmbientPose::embed(const PoseMatrix& pose) {
    AmbientPose out;
    out.c[0] = 1.0;
    for (int i = 0; i < 9; ++i) out.c[static_cast<std::size_t>(1 + i)] = pose.linear[static_cast<std::size_t>(i)];
    for (int i = 0; i < 3; ++i) out.c[static_cast<std::size_t>(10 + i)] = pose.translation[static_cast<std::size_t>(i)];
    return out;
}

std::array<double, 10> AmbientPose::rotational() const {
    std::array<double, 10> out;
    std::copy(c.begin(), c.begin() + 10, out.begin());
    return out;
}

PoseMatrix AmbientPose::restrict_to_pose(double tol) const {
    if (std::abs(c[0]) <= tol) {
        throw InvalidPose("restrict_to_pose: homogenizer x0 is zero");
    }
    PoseMatrix pose;
    for (int i = 0; i < 9; ++i) pose.linear[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(1 + i)] / c[0];
    for (int i = 0; i < 3; ++i) pose.translation[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(10 + i)] / c[0];
    const auto report = validate_pose(pose);
    if (!report.ok(tol)) {
        throw InvalidPose("restrict_to_pose: linear part not special orthogonal (orthogonality " +
                          std::to_string(report.max_orthogonality_residual) + ", det deviation " +
                          std::to_string(report.det_deviation) + ")");
    }
    return pose;
}

double AmbientPose::max_abs() const {
    double m = 0;
    for (double v : c) m = std::max(m, std::abs(v));
    return m;
}

AmbientPose operator+(const AmbientPose& a, const AmbientPose& b) {
    AmbientPose out;
    for (std::size_t i = 0; i < 13; ++i) out.c[i] = a.c[i] + b.c[i];
    return out;
}

AmbientPose operator-(const AmbientPose& a, const AmbientPose& b) {
    AmbientPose out;
    for (std::size_t i = 0; i < 13; ++i) out.c[i] = a.c[i] - b.c[i];
    return out;
}

AmbientPose operator*(double s, const AmbientPose& a) {
    AmbientPose out;
    for (std::size_t i = 0; i < 13; ++i) out.c[i] = s * a.c[i];
    return out;
}

std::array<double, 4> euler_form(int ell, const std::array<double, 10>& x) {
    switch (ell) {
        case 0: return {x[0] + x[1] + x[5] + x[9], x[8] - x[6], x[3] - x[7], x[4] - x[2]};
        case 1: return {x[8] - x[6], x[0] + x[1] - x[5] - x[9], x[4] + x[2], x[7] + x[3]};
        case 2: return {x[3] - x[7], x[4] + x[2], x[0] - x[1] + x[5] - x[9], x[8] + x[6]};
        case 3: return {x[4] - x[2], x[7] + x[3], x[8] + x[6], x[0] - x[1] - x[5] + x[9]};
        default: throw InvalidInput("euler_form: index must be 0..3");
    }
}

namespace {
double tuple_norm(const std::array<double, 4>& t) {
    return std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2] + t[3] * t[3]);
}
}  // namespace

int EulerRatios::best_index() const {
    int best = 0;
    double bestNorm = -1;
    for (int ell = 0; ell < 4; ++ell) {
        const double n = tuple_norm(tuple[static_cast<std::size_t>(ell)]);
        if (n > bestNorm) { bestNorm = n; best = ell; }
    }
    return best;
}

EulerRatios euler_ratios(const AmbientPose& x) {
    const auto rot = x.rotational();
    EulerRatios out;
    double total = 0;
    for (int ell = 0; ell < 4; ++ell) {
        out.tuple[static_cast<std::size_t>(ell)] = euler_form(ell, rot);
        total += tuple_norm(out.tuple[static_cast<std::size_t>(ell)]);
    }
    if (total <= 1e-14 * std::max(1.0, x.max_abs())) {
        throw AllZero("euler_ratios: all four candidate tuples vanish");
    }
    return out;
}

Quaternion dual_from_primal(const Quaternion& p, const Vec3& a) {
    return {0.5 * (a[0] * p.x + a[1] * p.y + a[2] * p.z),
            0.5 * (-a[0] * p.w + a[2] * p.y - a[1] * p.z),
            0.5 * (-a[1] * p.w - a[2] * p.x + a[0] * p.z),
            0.5 * (-a[2] * p.w + a[1] * p.x - a[0] * p.y)};
}

PoseMatrix dq_to_matrix_extended(const DualQuaternion& h, double tol) {
    const double p0 = h.p.w, p1 = h.p.x, p2 = h.p.y, p3 = h.p.z;
    const double q0 = h.q.w, q1 = h.q.x, q2 = h.q.y, q3 = h.q.z;
    const double delta = h.p.norm_sq();
    if (delta <= tol) {
        throw ZeroPrimal("dq_to_matrix: primal norm below tolerance");
    }
    PoseMatrix out;
    out.linear = {p0 * p0 + p1 * p1 - p2 * p2 - p3 * p3, 2 * (p1 * p2 - p0 * p3), 2 * (p0 * p2 + p1 * p3),
                  2 * (p0 * p3 + p1 * p2), p0 * p0 - p1 * p1 + p2 * p2 - p3 * p3, 2 * (p2 * p3 - p0 * p1),
                  2 * (p1 * p3 - p0 * p2), 2 * (p0 * p1 + p2 * p3), p0 * p0 - p1 * p1 - p2 * p2 + p3 * p3};
    for (auto& v : out.linear) v /= delta;
    out.translation = {2 * (-p0 * q1 + p1 * q0 - p2 * q3 + p3 * q2) / delta,
                       2 * (-p0 * q2 + p1 * q3 + p2 * q0 - p3 * q1) / delta,
                       2 * (-p0 * q3 - p1 * q2 + p2 * q1 + p3 * q0) / delta};
    return out;
}

PoseMatrix dq_to_matrix(const DualQuaternion& h, double tol) {
    const double delta = h.p.norm_sq();
    if (delta <= tol) {
        throw ZeroPrimal("dq_to_matrix: primal norm below tolerance");
    }
    if (std::abs(study_residual(h)) / delta > tol) {
        throw StudyViolation("dq_to_matrix: Study residual " +
                             std::to_string(study_residual(h) / delta) + " above tolerance");
    }
    return dq_to_matrix_extended(h, tol);
}

StudyConversion matrix_to_dq_detail(const PoseMatrix& pose, double tol) {
    const auto report = validate_pose(pose);
    if (!report.ok(tol)) {
        throw InvalidPose("matrix_to_dq: linear part not special orthogonal (orthogonality " +
                          std::to_string(report.max_orthogonality_residual) + ", det deviation " +
                          std::to_string(report.det_deviation) + ")");
    }
    const auto ratios = euler_ratios(AmbientPose::embed(pose));
    const int ell = ratios.best_index();
    auto t = ratios.tuple[static_cast<std::size_t>(ell)];

    // Normalize; fix the sign so the dominant entry is positive.
    const double n = tuple_norm(t);
    int k = 0;
    for (int i = 1; i < 4; ++i) {
        if (std::abs(t[static_cast<std::size_t>(i)]) > std::abs(t[static_cast<std::size_t>(k)])) k = i;
    }
    const double sign = t[static_cast<std::size_t>(k)] < 0 ? -1.0 : 1.0;
    Quaternion p{sign * t[0] / n, sign * t[1] / n, sign * t[2] / n, sign * t[3] / n};
    return {DualQuaternion{p, dual_from_primal(p, pose.translation)}, ell};
}

DualQuaternion matrix_to_dq(const PoseMatrix& pose, double tol) {
    return matrix_to_dq_detail(pose, tol).h;
}

FiberLine study_fiber(const DualQuaternion& h, double tol) {
    if (h.p.norm_sq() <= tol) {
        throw ZeroPrimal("study_fiber: primal norm below tolerance");
    }
    return {h, DualQuaternion{Quaternion{}, h.p}};
}

}  // namespace motionforge
