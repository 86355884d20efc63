#include "motionforge/motions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace motionforge {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    return {v[0] / n, v[1] / n, v[2] / n};
}

// Right-handed orthonormal completion (u, v, axis); the identity frame when
// axis is the third coordinate axis.
void complete_frame(const Vec3& axis, Vec3& u, Vec3& v) {
    int k = 0;
    for (int i = 1; i < 3; ++i) {
        if (std::abs(axis[static_cast<std::size_t>(i)]) < std::abs(axis[static_cast<std::size_t>(k)])) k = i;
    }
    Vec3 e{0, 0, 0};
    e[static_cast<std::size_t>(k)] = 1;
    u = normalized(e - dot(e, axis) * axis);
    v = cross(axis, u);
}

double wrap_to_pi(double a) {
    a = std::fmod(a + kPi, 2 * kPi);
    if (a < 0) a += 2 * kPi;
    return a - kPi;
}

// Deviation of a displacement from the canonical cylinder form (rotation
// about, translation along the third axis).
double cylinder_deviation(const PoseMatrix& d) {
    double dev = 0;
    dev = std::max(dev, std::abs(d.at(0, 2)));
    dev = std::max(dev, std::abs(d.at(1, 2)));
    dev = std::max(dev, std::abs(d.at(2, 0)));
    dev = std::max(dev, std::abs(d.at(2, 1)));
    dev = std::max(dev, std::abs(d.at(2, 2) - 1.0));
    dev = std::max(dev, std::abs(d.translation[0]));
    dev = std::max(dev, std::abs(d.translation[1]));
    return dev;
}

struct CylinderTrace {
    std::vector<std::array<double, 3>> samples;  // (t, omega, z)
    double max_deviation = 0;
};

// Relative poses of the motion in the pair's cylinder frame, angles unwrapped.
CylinderTrace trace_in_cylinder(const MotionCurve& motion, const CanonicalPair& pair, int n_samples,
                                double tol) {
    CylinderTrace out;
    const PoseMatrix S = pair.frame;
    const PoseMatrix Sinv = S.inverse();
    const double lo = motion.domain[0], hi = motion.domain[1];

    bool have_ref = false;
    PoseMatrix ref_inv;
    double prev_omega = 0;
    bool have_prev = false;
    for (int i = 0; i < n_samples; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const DualQuaternion h = motion.at(t);
        if (h.p.norm_sq() <= 1e-12 * (1.0 + h.norm_sq_total())) continue;  // exceptional point
        const PoseMatrix P = dq_to_matrix_extended(h);
        if (!have_ref) {
            ref_inv = P.inverse();
            have_ref = true;
        }
        const PoseMatrix rel = Sinv * (P * ref_inv) * S;
        out.max_deviation = std::max(out.max_deviation, cylinder_deviation(rel));
        double omega = std::atan2(rel.at(1, 0), rel.at(0, 0));
        if (have_prev) {
            omega = prev_omega + wrap_to_pi(omega - prev_omega);
        }
        prev_omega = omega;
        have_prev = true;
        out.samples.push_back({t, omega, rel.translation[2]});
    }
    if (out.samples.size() < 2) {
        throw NotInCylinderGroup("trace_in_cylinder: not enough valid samples");
    }
    if (out.max_deviation > tol) {
        throw NotInCylinderGroup("motion leaves the cylinder group, max deviation " +
                                 std::to_string(out.max_deviation));
    }
    return out;
}

void cubic_law_coefficients(const CubicMeta& meta, double phi, double d, double& Nt, double& w1,
                            double& w0, double& Nz, double& z1, double& z0) {
    Nt = meta.m0 * std::sin(phi) + meta.m3 * (1 - std::cos(phi));
    w1 = meta.m0 * (std::cos(phi) - 1) + meta.m3 * std::sin(phi);
    w0 = 2 * meta.m0;
    Nz = d * (meta.bEss + 1);
    z1 = meta.bEss - meta.aEss;
    z0 = 1 + meta.aEss;
}

}  // namespace

ScrewParameters screw_parameters(const PoseMatrix& displacement, double tol) {
    ScrewParameters out;
    Quaternion p = matrix_to_dq(displacement, tol).p;
    if (p.w < 0) p = -p;
    const double vn = norm(p.vec());
    const Vec3 t = displacement.translation;
    if (vn <= tol) {
        const double tn = norm(t);
        if (tn <= tol) {
            out.degenerate = true;
            return out;
        }
        out.pure_translation = true;
        out.axis_direction = (1.0 / tn) * t;
        out.translation = tn;
        return out;
    }
    out.angle = 2.0 * std::atan2(vn, p.w);
    out.axis_direction = (1.0 / vn) * p.vec();
    out.translation = dot(t, out.axis_direction);
    const Vec3 tperp = t - out.translation * out.axis_direction;
    const double cot_half = p.w / vn;
    out.axis_point = 0.5 * (tperp + cot_half * cross(out.axis_direction, tperp));
    return out;
}

CanonicalPair canonicalize_pair(const PoseMatrix& A, const PoseMatrix& B, double tol) {
    CanonicalPair out;
    out.A = A;
    out.B = B;
    const PoseMatrix D = B * A.inverse();
    const ScrewParameters s = screw_parameters(D, tol);
    if (s.degenerate) {
        out.degenerate = true;
        return out;  // frame stays the identity, phi = d = 0
    }
    out.pure_translation = s.pure_translation;
    out.phi = s.angle;
    out.d = s.translation;
    Vec3 u, v;
    complete_frame(s.axis_direction, u, v);
    out.frame = PoseMatrix::from_columns(u, v, s.axis_direction, s.axis_point);
    return out;
}

DualQuaternion MotionCurve::at(double t) const {
    return sampler ? sampler(t) : poly.eval(t);
}

PoseMatrix MotionCurve::pose_at(double t, double tol) const {
    return dq_to_matrix_extended(at(t), tol);
}

MotionCurve darboux_interpolant(const DualQuaternion& hA_in, const DualQuaternion& hB_in, double sA,
                                double sB, double tol) {
    if (hA_in.p.norm_sq() <= tol || hB_in.p.norm_sq() <= tol) {
        throw ZeroPrimal("darboux_interpolant: endpoint primal norm below tolerance");
    }
    const DualQuaternion hA = hA_in;
    const DualQuaternion hB = dot(hA_in.p, hB_in.p) < 0 ? -hB_in : hB_in;

    const DualQuaternion repA{hA.p, hA.q + sA * hA.p};
    const DualQuaternion repB{hB.p, hB.q + sB * hB.p};

    // Primal root in [0, 1] would put the motion through the exceptional generator.
    const Quaternion u = repA.p;
    const Quaternion w = repB.p - repA.p;
    double tmin = 0;
    if (w.norm_sq() > 0) tmin = std::clamp(-dot(u, w) / w.norm_sq(), 0.0, 1.0);
    const Quaternion pmin = u + tmin * w;
    if (pmin.norm_sq() <= tol * tol) {
        throw PrimalVanishes("darboux_interpolant: primal part vanishes inside [0,1]; "
                             "flip the sign of one representative");
    }

    MotionCurve out;
    out.kind = MotionKind::darboux;
    out.poly = DualQuatPoly::line(repA, repB);
    out.darboux = DarbouxMeta{sA, sB};
    out.pair = canonicalize_pair(dq_to_matrix_extended(hA), dq_to_matrix_extended(hB), tol);
    return out;
}

MotionCurve cubic_interpolant(const CanonicalPair& pair, const MapSelector& m, const FiberOffsets& alpha,
                              const FiberOffsets& beta, double tol, bool allow_pole) {
    MotionCurve out;
    out.kind = MotionKind::cubic;
    out.pair = pair;

    const DualQuaternion hA = matrix_to_dq(pair.A, tol);
    if (pair.degenerate) {
        out.poly = DualQuatPoly::constant(hA);
        out.cubic = CubicMeta{m.m[0], m.m[3], 0, 0};
        return out;
    }

    FiberGenerator fibA(m, AmbientPose::embed(PoseMatrix::identity()), tol);
    FiberGenerator fibB(m, AmbientPose::embed(pair.canonical_end()), tol);
    const double aEss = fibA.psi_perturbation(alpha);
    const double bEss = fibB.psi_perturbation(beta);
    if (!allow_pole && (1 + aEss <= tol || 1 + bEss <= tol)) {
        throw PoleInDomain("cubic_interpolant: (1-t)(1+aEss) + t(1+bEss) has a zero in [0,1] "
                           "(aEss = " + std::to_string(aEss) + ", bEss = " + std::to_string(bEss) + ")");
    }

    const AmbientPose a0 = fibA.at(alpha);
    const AmbientPose b0 = fibB.at(beta);
    DualQuatPoly canonical = mu_poly(m, {a0, b0 - a0});

    // The rotational image must stay nonzero along the segment (the pole
    // factor is handled above; this catches antipodal rotational images).
    const auto pa = mu_prime(m, a0.rotational());
    const auto pb = mu_prime(m, b0.rotational());
    const Quaternion qa{pa[0], pa[1], pa[2], pa[3]};
    const Quaternion qb{pb[0], pb[1], pb[2], pb[3]};
    const Quaternion diff = qb - qa;
    double tmin = 0;
    if (diff.norm_sq() > 0) tmin = std::clamp(-dot(qa, diff) / diff.norm_sq(), 0.0, 1.0);
    const Quaternion pmid = qa + tmin * diff;
    const double scale = std::max(qa.norm_sq(), qb.norm_sq());
    if (pmid.norm_sq() <= tol * tol * std::max(1.0, scale)) {
        throw ZeroImage("cubic_interpolant: rotational image vanishes at t = " + std::to_string(tmin));
    }

    out.cubic = CubicMeta{m.m[0], m.m[3], aEss, bEss};
    const DualQuaternion hS = matrix_to_dq(pair.frame, tol);
    out.poly = hS * (canonical * (conj(hS) * hA));
    return out;
}

HelicalResult helical_interpolant(const CanonicalPair& pair, double tol) {
    HelicalResult out;
    out.invariants.axis_point = pair.axis_point();
    out.invariants.axis_direction = pair.axis_direction();
    out.invariants.angle = pair.phi;
    out.invariants.translation = pair.d;
    if (std::abs(pair.phi) <= tol) {
        out.invariants.pitch = std::abs(pair.d) <= tol ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
        out.invariants.pitch = pair.d / pair.phi;
    }

    const DualQuaternion hS = matrix_to_dq(pair.frame, tol);
    const DualQuaternion right = conj(hS) * matrix_to_dq(pair.A, tol);
    const double phi = pair.phi, d = pair.d;

    MotionCurve mc;
    mc.kind = MotionKind::helical;
    mc.pair = pair;
    mc.sampler = [hS, right, phi, d](double t) {
        const double c = std::cos(0.5 * phi * t);
        const double s = std::sin(0.5 * phi * t);
        const double z = 0.5 * d * t;
        const DualQuaternion h{{c, 0, 0, s}, {z * s, 0, 0, -z * c}};
        return hS * h * right;
    };
    out.motion = std::move(mc);
    return out;
}

TransmissionCurve transmission_curve(const MotionCurve& motion, const CanonicalPair& pair, int n_samples,
                                     double tol) {
    TransmissionCurve out;
    CylinderTrace trace = trace_in_cylinder(motion, pair, n_samples, tol);
    out.samples = std::move(trace.samples);

    double omega_max = 0;
    for (const auto& s : out.samples) omega_max = std::max(omega_max, std::abs(s[1]));

    const bool tangent_kind =
        motion.kind == MotionKind::cubic ||
        (motion.kind == MotionKind::line_symmetric && motion.surface &&
         *motion.surface == RuledSurface::hyperbolic_paraboloid);

    auto cross_residual = [&](double p, double q, double r, double s) {
        const double scale = std::max({std::abs(p), std::abs(q), std::abs(r), std::abs(s), 1e-300});
        double res = 0;
        for (const auto& smp : out.samples) {
            const double t = smp[0], om = smp[1], z = smp[2];
            const double e = (p * t + q) * std::sin(om / 2) - (r * t + s) * z * std::cos(om / 2);
            res = std::max(res, std::abs(e) / (scale * (1.0 + std::abs(z))));
        }
        return res;
    };

    if (tangent_kind && motion.cubic && motion.pair) {
        out.law = TransmissionCurve::Law::tangent;
        double Nt, w1, w0, Nz, z1, z0;
        cubic_law_coefficients(*motion.cubic, motion.pair->phi, motion.pair->d, Nt, w1, w0, Nz, z1, z0);
        out.p = Nz * w1;
        out.q = Nz * w0;
        out.r = Nt * z1;
        out.s = Nt * z0;
        const double scale = std::max({std::abs(out.p), std::abs(out.q), std::abs(out.r), std::abs(out.s)});
        if (scale > 0) {
            out.p /= scale;
            out.q /= scale;
            out.r /= scale;
            out.s /= scale;
        }
        out.fit_residual = cross_residual(out.p, out.q, out.r, out.s);
    } else if (tangent_kind) {
        // Tangent law by homogeneous least squares on the samples.
        out.law = TransmissionCurve::Law::tangent;
        Eigen::MatrixXd rows(static_cast<Eigen::Index>(out.samples.size()), 4);
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            const auto& smp = out.samples[static_cast<std::size_t>(i)];
            const double t = smp[0], om = smp[1], z = smp[2];
            rows(i, 0) = t * std::sin(om / 2);
            rows(i, 1) = std::sin(om / 2);
            rows(i, 2) = -t * z * std::cos(om / 2);
            rows(i, 3) = -z * std::cos(om / 2);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
        const Eigen::Vector4d v = svd.matrixV().col(3);
        const double scale = v.cwiseAbs().maxCoeff();
        out.p = v(0) / scale;
        out.q = v(1) / scale;
        out.r = v(2) / scale;
        out.s = v(3) / scale;
        out.fit_residual = cross_residual(out.p, out.q, out.r, out.s);
    } else {
        out.law = TransmissionCurve::Law::sine;
        if (omega_max <= tol) {
            out.degenerate_translation = true;
            return out;
        }
        // z = u sin(omega) + v (cos(omega) - 1), then lambda, kappa from (u, v).
        Eigen::MatrixXd Arows(static_cast<Eigen::Index>(out.samples.size()), 2);
        Eigen::VectorXd b(static_cast<Eigen::Index>(out.samples.size()));
        for (Eigen::Index i = 0; i < Arows.rows(); ++i) {
            const auto& smp = out.samples[static_cast<std::size_t>(i)];
            Arows(i, 0) = std::sin(smp[1]);
            Arows(i, 1) = std::cos(smp[1]) - 1.0;
            b(i) = smp[2];
        }
        const Eigen::Vector2d uv = Arows.colPivHouseholderQr().solve(b);
        out.lambda = std::hypot(uv(0), uv(1));
        out.kappa = std::atan2(uv(1), uv(0));
        double res = 0;
        for (const auto& smp : out.samples) {
            const double model = uv(0) * std::sin(smp[1]) + uv(1) * (std::cos(smp[1]) - 1.0);
            res = std::max(res, std::abs(model - smp[2]));
        }
        out.fit_residual = res;
    }
    return out;
}

double pitch_at(const MotionCurve& motion, double t0, double tol) {
    const double inf = std::numeric_limits<double>::infinity();

    if (motion.kind == MotionKind::helical && motion.pair) {
        if (std::abs(motion.pair->phi) <= tol) return std::abs(motion.pair->d) <= tol ? 0.0 : inf;
        return motion.pair->d / motion.pair->phi;
    }

    if (motion.kind == MotionKind::cubic && motion.cubic && motion.pair) {
        const double phi = motion.pair->phi, d = motion.pair->d;
        double Nt, w1, w0, Nz, z1, z0;
        cubic_law_coefficients(*motion.cubic, phi, d, Nt, w1, w0, Nz, z1, z0);
        const double ang_rate = Nt * w0;
        if (std::abs(ang_rate) <= tol * tol) {
            return std::abs(Nz * z0) <= tol * tol ? 0.0 : inf;
        }
        const double num = Nz * z0 * ((w1 * t0 + w0) * (w1 * t0 + w0) + Nt * Nt * t0 * t0);
        const double den = 2 * ang_rate * (z1 * t0 + z0) * (z1 * t0 + z0);
        return num / den;
    }

    if (motion.kind == MotionKind::darboux && motion.darboux && motion.pair) {
        const double phi = motion.pair->phi, d = motion.pair->d;
        if (std::abs(phi) <= tol) return std::abs(d) <= tol ? 0.0 : inf;
        const double s_rel = motion.darboux->sA - motion.darboux->sB;
        const double lambda = std::hypot(d / 2, s_rel) / std::sin(phi / 2);
        const double kappa = std::atan2(s_rel, d / 2) - phi / 2;
        // omega(t0) modulo 2*pi is enough for the cosine.
        const PoseMatrix S = motion.pair->frame;
        const PoseMatrix P0inv = motion.pose_at(motion.domain[0]).inverse();
        const PoseMatrix rel = S.inverse() * (motion.pose_at(t0) * P0inv) * S;
        const double omega = std::atan2(rel.at(1, 0), rel.at(0, 0));
        return lambda * std::cos(omega + kappa);
    }

    // Generic: central differences in a cylinder frame.
    CanonicalPair frame_pair;
    if (motion.pair) {
        frame_pair = *motion.pair;
    } else {
        const auto check = cylinder_check(motion);
        if (!check.cylindrical) {
            throw NotInCylinderGroup("pitch_at: motion has no cylinder axis");
        }
        Vec3 u, v;
        complete_frame(check.axis_direction, u, v);
        frame_pair.frame = PoseMatrix::from_columns(u, v, check.axis_direction, check.axis_point);
    }
    const double h = 1e-6 * std::max(1.0, std::abs(motion.domain[1] - motion.domain[0]));
    const double ta = std::max(motion.domain[0], t0 - h);
    const double tb = std::min(motion.domain[1], t0 + h);
    const PoseMatrix S = frame_pair.frame;
    const PoseMatrix Sinv = S.inverse();
    const PoseMatrix Pa = motion.pose_at(ta);
    const PoseMatrix rel = Sinv * (motion.pose_at(tb) * Pa.inverse()) * S;
    const double domega = std::atan2(rel.at(1, 0), rel.at(0, 0));
    const double dz = rel.translation[2];
    if (std::abs(domega) <= 1e-14) return std::abs(dz) <= 1e-14 ? 0.0 : inf;
    return dz / domega;
}

namespace {

MotionCurve darboux_from_srel(const CanonicalPair& pair, double s_rel, double tol) {
    return darboux_interpolant(matrix_to_dq(pair.A, tol), matrix_to_dq(pair.B, tol), s_rel, 0.0, tol);
}

MotionCurve select_third_pose(const CanonicalPair& pair, const ThirdPoseConstraint& c, double tol) {
    if (pair.degenerate || std::abs(pair.phi) <= tol) {
        throw NoSolution("third-pose selection needs a rotational pair");
    }
    const PoseMatrix rel =
        pair.frame.inverse() * ((c.pose * pair.A.inverse()) * pair.frame);
    if (cylinder_deviation(rel) > tol) {
        throw ThirdPoseNotInCylinder("third pose leaves the cylinder group, deviation " +
                                     std::to_string(cylinder_deviation(rel)));
    }
    const double omega_c = std::atan2(rel.at(1, 0), rel.at(0, 0));
    const double z_c = rel.translation[2];
    const double phi = pair.phi, d = pair.d;

    // d = u sin(phi) + v (cos(phi) - 1);  z_c = u sin(omega_c) + v (cos(omega_c) - 1)
    const double det = std::sin(phi) * (std::cos(omega_c) - 1) - std::sin(omega_c) * (std::cos(phi) - 1);
    if (std::abs(det) <= 1e-9) {
        throw NoSolution("third pose coincides with an endpoint (or is a pure translation of one)");
    }
    const double u = (d * (std::cos(omega_c) - 1) - z_c * (std::cos(phi) - 1)) / det;
    const double v = (std::sin(phi) * z_c - std::sin(omega_c) * d) / det;
    const double s_rel = std::sin(phi / 2) * (v * std::cos(phi / 2) + u * std::sin(phi / 2));
    return darboux_from_srel(pair, s_rel, tol);
}

MotionCurve select_start_pitch(const CanonicalPair& pair, const StartPitchConstraint& c, double tol) {
    if (pair.degenerate || std::abs(pair.phi) <= tol) {
        throw NoSolution("start-pitch selection needs a rotational pair");
    }
    const double phi = pair.phi, d = pair.d;
    const double u = c.pitch;  // dz/domega at omega = 0 is lambda cos(kappa)
    const double v = (d - u * std::sin(phi)) / (std::cos(phi) - 1);
    const double s_rel = std::sin(phi / 2) * (v * std::cos(phi / 2) + u * std::sin(phi / 2));
    return darboux_from_srel(pair, s_rel, tol);
}

MotionCurve select_pitch_pair(const CanonicalPair& pair, const PitchPairConstraint& c, double tol) {
    if (pair.degenerate || std::abs(pair.phi) <= tol || std::abs(pair.d) <= tol) {
        throw NoSolution("pitch-pair selection needs both rotation and translation in the pair");
    }
    if (c.start_pitch * c.end_pitch <= 0) {
        throw PitchPairInfeasible("endpoint pitches of a cubic interpolant share their sign");
    }
    const double phi = pair.phi, d = pair.d;
    const double s2 = std::sin(phi / 2), c2 = std::cos(phi / 2);
    const double required = d * d / (4 * s2 * s2);
    const double product = c.start_pitch * c.end_pitch;
    if (std::abs(product - required) > 1e-9 * std::max(1.0, required)) {
        throw PitchPairInfeasible("pitch product is pinned to d^2/(4 sin^2(phi/2)) = " +
                                  std::to_string(required) + ", prescribed product " +
                                  std::to_string(product));
    }
    const double m0 = c.m.m[0];
    const double K = m0 * c2 + c.m.m[3] * s2;
    if (std::abs(m0) <= tol || std::abs(K) <= tol) {
        throw NoSolution("map selector degenerate for this pair");
    }
    const double ratio = c.start_pitch * 2 * s2 * K / (d * m0);  // (1 + bEss)/(1 + aEss)
    if (ratio <= tol) {
        throw PitchPairInfeasible("prescribed pitches demand a pole inside the domain");
    }
    const double bEss = ratio - 1;
    const auto basis = nullspace_basis(c.m);
    int best = 0;
    for (int l = 1; l < 6; ++l) {
        if (std::abs(basis.effective[static_cast<std::size_t>(l)][0]) >
            std::abs(basis.effective[static_cast<std::size_t>(best)][0])) {
            best = l;
        }
    }
    FiberOffsets beta{};
    const double lead = basis.effective[static_cast<std::size_t>(best)][0];
    if (std::abs(lead) <= 1e-12) {
        if (std::abs(bEss) > tol) {
            throw PitchPairInfeasible("map selector admits no fiber freedom for these pitches");
        }
    } else {
        beta[static_cast<std::size_t>(best)] = bEss / lead;
    }
    return cubic_interpolant(pair, c.m, FiberOffsets{}, beta, tol);
}

}  // namespace

MotionCurve select_interpolant(const CanonicalPair& pair, const InterpolantConstraint& constraint,
                               double tol) {
    return std::visit(
        [&](const auto& c) -> MotionCurve {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ThirdPoseConstraint>) {
                return select_third_pose(pair, c, tol);
            } else if constexpr (std::is_same_v<T, StartPitchConstraint>) {
                return select_start_pitch(pair, c, tol);
            } else {
                return select_pitch_pair(pair, c, tol);
            }
        },
        constraint);
}

// ---------------------------------------------------------------------------
// Trajectories.
// ---------------------------------------------------------------------------

namespace {

RealPoly reversed_poly(const RealPoly& f) {
    std::vector<double> c(f.coeffs().rbegin(), f.coeffs().rend());
    return RealPoly(std::move(c));
}

std::complex<double> newton_steps(const RealPoly& f, std::complex<double> z) {
    const RealPoly df = f.derivative();
    for (int i = 0; i < 80; ++i) {
        const std::complex<double> fz = f.eval(z);
        const std::complex<double> dz = df.eval(z);
        if (std::abs(dz) <= 1e-300) break;
        const std::complex<double> step = fz / dz;
        z -= step;
        if (std::abs(step) <= 1e-16 * (1.0 + std::abs(z))) break;
    }
    return z;
}

// Roots of magnitude above one are handled on the reversed polynomial in the
// inverted coordinate, where evaluation and deflation are well conditioned.
std::complex<double> polish_root(const RealPoly& f, std::complex<double> r) {
    if (std::abs(r) <= 1.0) return newton_steps(f, r);
    const std::complex<double> s = newton_steps(reversed_poly(f), 1.0 / r);
    if (std::abs(s) <= 1e-300) return r;
    return 1.0 / s;
}

// Conditioned residual of f at r: |f(r)| relative to sum_k |c_k| |r|^k,
// computed in the inverted coordinate for distant roots.
double root_residual(const RealPoly& f, const std::complex<double>& r) {
    const RealPoly& g = std::abs(r) <= 1.0 ? f : reversed_poly(f);
    const std::complex<double> z = std::abs(r) <= 1.0 ? r : 1.0 / r;
    double scale = 0, zp = 1;
    for (std::size_t k = 0; k < g.size(); ++k) {
        scale += std::abs(g[k]) * zp;
        zp *= std::abs(z);
    }
    return std::abs(g.eval(z)) / std::max(scale, 1e-300);
}

double chordal_distance(const std::complex<double>& a, const std::complex<double>& b) {
    return std::abs(a - b) /
           std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
}

RealPoly deflate_linear(const RealPoly& f, double r) {
    if (std::abs(r) <= 1.0) {
        return poly_divide(f, RealPoly({-r, 1.0})).quotient;
    }
    // f = (t - r) q  <=>  rev f = -r (t - 1/r) rev q
    RealPoly revq = poly_divide(reversed_poly(f), RealPoly({-1.0 / r, 1.0})).quotient;
    std::vector<double> c(revq.coeffs().rbegin(), revq.coeffs().rend());
    for (double& v : c) v /= -r;
    return RealPoly(std::move(c));
}

RealPoly deflate_quadratic(const RealPoly& f, const std::complex<double>& r) {
    if (std::abs(r) <= 1.0) {
        return poly_divide(f, RealPoly({std::norm(r), -2.0 * r.real(), 1.0})).quotient;
    }
    // divide the reversed polynomial by the quadratic with roots 1/r, conj(1/r)
    const std::complex<double> s = 1.0 / r;
    RealPoly revq = poly_divide(reversed_poly(f), RealPoly({std::norm(s), -2.0 * s.real(), 1.0})).quotient;
    std::vector<double> c(revq.coeffs().rbegin(), revq.coeffs().rend());
    for (double& v : c) v /= std::norm(r);
    return RealPoly(std::move(c));
}

// Deflate the common factor of the four coordinate polynomials. Candidate
// roots come from the polynomial of smallest degree; each candidate is
// Newton-polished on every polynomial separately (crucial where the root is
// a double root of one of them, e.g. of w = P conj(P): the split eigenvalues
// of its companion matrix are off by ~sqrt(eps) and may even come out as a
// spurious conjugate pair, while the same root is simple in the other
// coordinates and polishes to machine precision there). All per-polynomial
// roots must agree chordally and evaluate to a conditioned residual at
// rounding level; each polynomial is then deflated by its own polished root.
void remove_common_content(std::array<RealPoly, 4>& polys) {
    const double rel = 1e-10;
    for (auto& p : polys) p = p.trimmed(rel);

    for (int pass = 0; pass < 16; ++pass) {
        int ref = -1;
        bool constant_nonzero = false;
        for (int i = 0; i < 4; ++i) {
            const int d = polys[static_cast<std::size_t>(i)].degree();
            if (d == 0) constant_nonzero = true;
            if (d >= 1 && (ref < 0 || d < polys[static_cast<std::size_t>(ref)].degree())) ref = i;
        }
        if (ref < 0 || constant_nonzero) return;  // no roots left to share

        auto roots = poly_roots(polys[static_cast<std::size_t>(ref)]);
        std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
            if (a.real() != b.real()) return a.real() < b.real();
            return a.imag() < b.imag();
        });

        bool deflated = false;
        for (const auto& r : roots) {
            bool common = true;
            std::array<std::complex<double>, 4> polished{};
            std::complex<double> best_root = r;
            double best_derivative = -1;
            for (int i = 0; i < 4 && common; ++i) {
                const RealPoly& p = polys[static_cast<std::size_t>(i)];
                if (p.degree() < 1) continue;  // identically-zero coordinate
                const std::complex<double> rf = polish_root(p, r);
                polished[static_cast<std::size_t>(i)] = rf;
                if (root_residual(p, rf) > 1e-10 || chordal_distance(rf, r) > 1e-4) {
                    common = false;
                    break;
                }
                const double dscale =
                    p.max_abs_coeff() * std::pow(1.0 + std::abs(rf), std::max(0, p.degree() - 1));
                const double drel = std::abs(p.derivative().eval(rf)) / dscale;
                if (drel > best_derivative) {
                    best_derivative = drel;
                    best_root = rf;
                }
            }
            if (common) {
                // polished roots of the different coordinates must coincide
                for (int i = 0; i < 4 && common; ++i) {
                    if (polys[static_cast<std::size_t>(i)].degree() < 1) continue;
                    if (chordal_distance(polished[static_cast<std::size_t>(i)], best_root) > 1e-6) {
                        common = false;
                    }
                }
            }
            if (!common) continue;

            // One shared root for every coordinate: numerator and denominator
            // must lose exactly the same factor or the curve itself changes.
            // best_root comes from a simple occurrence and is accurate to
            // rounding even where other coordinates carry it as a double root.
            const bool is_real = 2 * std::abs(best_root.imag()) <= 1e-6 * (1.0 + std::norm(best_root));
            for (int i = 0; i < 4; ++i) {
                RealPoly& p = polys[static_cast<std::size_t>(i)];
                if (p.degree() < 1) {
                    p = p.trimmed(rel);
                    continue;
                }
                if (is_real) {
                    p = deflate_linear(p, best_root.real()).trimmed(rel);
                } else if (p.degree() >= 2) {
                    p = deflate_quadratic(p, best_root).trimmed(rel);
                } else {
                    p = RealPoly(std::vector<double>{});  // a linear factor cannot carry the pair
                }
            }
            deflated = true;
            break;
        }
        if (!deflated) return;
    }
}

}  // namespace

int RationalCurve::degree() const {
    return std::max({w.degree(), x.degree(), y.degree(), z.degree()});
}

int RationalCurve::points_at_infinity(double tol) const {
    std::vector<double> reals;
    for (const auto& r : poly_roots(w)) {
        if (std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r.real()))) reals.push_back(r.real());
    }
    std::sort(reals.begin(), reals.end());
    int count = 0;
    for (std::size_t i = 0; i < reals.size(); ++i) {
        if (i == 0 || reals[i] - reals[i - 1] > 1e-6 * (1.0 + std::abs(reals[i]))) ++count;
    }
    // t = infinity is a point at infinity whenever the homogenizer has lower degree
    if (w.degree() < degree()) ++count;
    (void)tol;
    return count;
}

Vec3 RationalCurve::eval(double t) const {
    const double wv = w.eval(t);
    return {x.eval(t) / wv, y.eval(t) / wv, z.eval(t) / wv};
}

RationalCurve trajectory_exact(const MotionCurve& motion, const Vec3& pt, double tol) {
    if (!motion.algebraic()) {
        throw NonAlgebraicMotion("trajectory_exact: motion is sampled, not polynomial");
    }
    const auto& coeffs = motion.poly.coeffs();
    std::vector<DualQuaternion> pc, qc;
    pc.reserve(coeffs.size());
    qc.reserve(coeffs.size());
    for (const auto& c : coeffs) {
        pc.push_back(DualQuaternion{c.p, {}});
        qc.push_back(DualQuaternion{c.q, {}});
    }
    const DualQuatPoly P{std::move(pc)}, Q{std::move(qc)};
    if (P.degree() < 0) {
        throw ZeroPrimal("trajectory_exact: primal part identically zero");
    }
    const DualQuatPoly X = DualQuatPoly::constant({Quaternion::from_vector(pt), {}});

    const DualQuatPoly W = P * P.conjugated();
    const DualQuatPoly Y = P * Q.conjugated() - Q * P.conjugated() + P * X * P.conjugated();

    std::array<RealPoly, 4> polys;
    {
        std::vector<double> w(W.size()), yx(Y.size()), yy(Y.size()), yz(Y.size());
        for (std::size_t i = 0; i < W.size(); ++i) w[i] = W[i].p.w;
        for (std::size_t i = 0; i < Y.size(); ++i) {
            yx[i] = Y[i].p.x;
            yy[i] = Y[i].p.y;
            yz[i] = Y[i].p.z;
        }
        polys = {RealPoly(w), RealPoly(yx), RealPoly(yy), RealPoly(yz)};
    }
    remove_common_content(polys);
    (void)tol;
    return {polys[0], polys[1], polys[2], polys[3]};
}

TrajectoryDiagnostics trajectory_diagnostics(const RationalCurve& curve, const Vec3& axis_direction,
                                             int n_samples, double lo, double hi) {
    TrajectoryDiagnostics out;
    out.degree = curve.degree();
    out.points_at_infinity = curve.points_at_infinity();

    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n_samples));
    const double wscale = curve.w.max_abs_coeff();
    for (int i = 0; i < n_samples; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
        if (std::abs(curve.w.eval(t)) <= 1e-9 * std::max(1.0, wscale)) continue;
        pts.push_back(curve.eval(t));
    }

    // --- projection along the axis: circle fit
    const Vec3 axis = normalized(axis_direction);
    Vec3 u, v;
    complete_frame(axis, u, v);
    std::vector<std::array<double, 2>> plane;
    plane.reserve(pts.size());
    double mx = 0, my = 0;
    for (const auto& p : pts) {
        plane.push_back({dot(p, u), dot(p, v)});
        mx += plane.back()[0];
        my += plane.back()[1];
    }
    mx /= static_cast<double>(plane.size());
    my /= static_cast<double>(plane.size());
    double spread = 0;
    for (const auto& p : plane) spread = std::max(spread, std::hypot(p[0] - mx, p[1] - my));
    if (spread <= 1e-12 * (1.0 + std::abs(mx) + std::abs(my))) {
        out.circle_radius = 0;
        out.circle_residual = spread;
    } else {
        Eigen::MatrixXd A(static_cast<Eigen::Index>(plane.size()), 3);
        Eigen::VectorXd b(static_cast<Eigen::Index>(plane.size()));
        for (Eigen::Index i = 0; i < A.rows(); ++i) {
            const auto& p = plane[static_cast<std::size_t>(i)];
            A(i, 0) = 2 * p[0];
            A(i, 1) = 2 * p[1];
            A(i, 2) = 1;
            b(i) = p[0] * p[0] + p[1] * p[1];
        }
        const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(b);
        const double r2 = sol(2) + sol(0) * sol(0) + sol(1) * sol(1);
        out.circle_radius = r2 > 0 ? std::sqrt(r2) : 0;
        double res = 0;
        for (const auto& p : plane) {
            res = std::max(res, std::abs(std::hypot(p[0] - sol(0), p[1] - sol(1)) - out.circle_radius));
        }
        out.circle_residual = res;
    }

    // --- planar conic fit and classification
    Eigen::MatrixXd M(static_cast<Eigen::Index>(pts.size()), 3);
    Vec3 mean{0, 0, 0};
    for (const auto& p : pts) mean = mean + (1.0 / static_cast<double>(pts.size())) * p;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        const Vec3 d = pts[static_cast<std::size_t>(i)] - mean;
        M(i, 0) = d[0];
        M(i, 1) = d[1];
        M(i, 2) = d[2];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    const double s0 = svd.singularValues()(0);
    const double s1 = svd.singularValues()(1);
    const double s2 = svd.singularValues()(2);
    const double nrm = std::sqrt(static_cast<double>(pts.size()));
    out.planarity_residual = s2 / nrm;

    if (s0 / nrm <= 1e-10) {
        out.classification = "point";
        return out;
    }
    if (s1 <= 1e-8 * s0) {
        out.classification = "segment";
        return out;
    }
    if (s2 > 1e-6 * s0) {
        out.classification = "nonplanar";
        return out;
    }

    const Eigen::Vector3d e1 = svd.matrixV().col(0), e2 = svd.matrixV().col(1);
    double rms = 0;
    std::vector<std::array<double, 2>> pc(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec3 d = pts[i] - mean;
        pc[i] = {d[0] * e1(0) + d[1] * e1(1) + d[2] * e1(2),
                 d[0] * e2(0) + d[1] * e2(1) + d[2] * e2(2)};
        rms += pc[i][0] * pc[i][0] + pc[i][1] * pc[i][1];
    }
    rms = std::sqrt(rms / static_cast<double>(pts.size()));
    Eigen::MatrixXd C(static_cast<Eigen::Index>(pts.size()), 6);
    for (Eigen::Index i = 0; i < C.rows(); ++i) {
        const double xx = pc[static_cast<std::size_t>(i)][0] / rms;
        const double yy = pc[static_cast<std::size_t>(i)][1] / rms;
        C(i, 0) = xx * xx;
        C(i, 1) = xx * yy;
        C(i, 2) = yy * yy;
        C(i, 3) = xx;
        C(i, 4) = yy;
        C(i, 5) = 1;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> csvd(C, Eigen::ComputeFullV);
    const Eigen::VectorXd theta = csvd.matrixV().col(5);
    double res = 0;
    for (Eigen::Index i = 0; i < C.rows(); ++i) res = std::max(res, std::abs(C.row(i).dot(theta)));
    out.conic_residual = res;
    const double disc = theta(1) * theta(1) - 4 * theta(0) * theta(2);
    const double qscale = theta(0) * theta(0) + theta(1) * theta(1) + theta(2) * theta(2);
    if (std::abs(disc) <= 1e-8 * std::max(1e-300, qscale)) {
        out.classification = "parabola";
    } else {
        out.classification = disc < 0 ? "ellipse" : "hyperbola";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ruled surfaces / line-symmetric motions.
// ---------------------------------------------------------------------------

std::array<double, 6> RulingFamily::pluecker_at(double t) const {
    std::array<double, 6> out = {direction[0].eval(t), direction[1].eval(t), direction[2].eval(t),
                                 moment[0].eval(t), moment[1].eval(t), moment[2].eval(t)};
    double m = 0;
    for (double v : out) m = std::max(m, std::abs(v));
    if (m > 0) {
        for (double& v : out) v /= m;
    }
    return out;
}

RulingFamily ruling_family_paraboloid(double pa, double pb) {
    if (pa == 0 || pb == 0) {
        throw InvalidSpec("hyperbolic paraboloid needs both parameters nonzero");
    }
    RulingFamily out;
    out.surface = RuledSurface::hyperbolic_paraboloid;
    out.par_a = pa;
    out.par_b = pb;
    out.direction = {RealPoly({0, 0, 4 * pa}), RealPoly({0, 0, 4 * pb}), RealPoly({0, 4})};
    out.moment = {RealPoly({pb}), RealPoly({pa}), RealPoly({0, -2 * pa * pb})};
    return out;
}

RulingFamily ruling_family_conoid(double c) {
    if (c == 0) {
        throw InvalidSpec("Pluecker conoid needs a nonzero parameter");
    }
    RulingFamily out;
    out.surface = RuledSurface::pluecker_conoid;
    out.par_c = c;
    // Rational parametrization of (cos h, sin h) rulings at height c sin(2h),
    // cleared to polynomial Pluecker coordinates.
    out.direction = {RealPoly({1, 0, 1, 0, -1, 0, -1}), RealPoly({0, 2, 0, 4, 0, 2}), RealPoly({0.0})};
    out.moment = {RealPoly({0, 0, -8 * c, 0, 8 * c}), RealPoly({0, 4 * c, 0, -8 * c, 0, 4 * c}),
                  RealPoly({0.0})};
    return out;
}

MotionCurve line_symmetric_motion(const RulingFamily& rulings) {
    std::size_t n = 1;
    for (const auto& p : rulings.direction) n = std::max(n, p.size());
    for (const auto& p : rulings.moment) n = std::max(n, p.size());
    std::vector<DualQuaternion> coeffs(n);
    for (std::size_t k = 0; k < n; ++k) {
        coeffs[k].p = {0, rulings.direction[0][k], rulings.direction[1][k], rulings.direction[2][k]};
        coeffs[k].q = {0, -rulings.moment[0][k], -rulings.moment[1][k], -rulings.moment[2][k]};
    }
    MotionCurve out;
    out.kind = MotionKind::line_symmetric;
    out.surface = rulings.surface;
    out.poly = DualQuatPoly(std::move(coeffs));
    return out;
}

CubicFactorization factor_cubic(double pa, double pb) {
    const double s = pa * pa + pb * pb;
    if (s == 0) {
        throw InvalidSpec("factor_cubic needs (pa, pb) != (0, 0)");
    }
    CubicFactorization out;
    const double w = (pa * pa - pb * pb) / (4 * s);
    const DualQuaternion f1c{{0, -pb / s, pa / s, 0}, {0, w * pa, w * pb, 0}};
    const DualQuaternion f2c{{0, 0, 0, 0}, {0, -pa / 4, pb / 4, 0}};
    out.F1 = DualQuatPoly({f1c, DualQuaternion::identity()});
    out.F2 = DualQuatPoly({f2c, DualQuaternion::identity()});
    out.leading = DualQuaternion{{0, 4 * pa, 4 * pb, 0}, {}};
    return out;
}

CylinderCheckResult cylinder_check(const MotionCurve& motion, int n_samples, double tol) {
    CylinderCheckResult out;
    const double lo = motion.domain[0], hi = motion.domain[1];
    std::vector<PoseMatrix> poses;
    poses.reserve(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        const double t = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1);
        const DualQuaternion h = motion.at(t);
        if (h.p.norm_sq() <= 1e-12 * (1.0 + h.norm_sq_total())) continue;
        poses.push_back(dq_to_matrix_extended(h));
    }
    if (poses.size() < 3) {
        out.cylindrical = false;
        out.max_deviation = std::numeric_limits<double>::infinity();
        return out;
    }

    const PoseMatrix ref_inv = poses.front().inverse();
    std::vector<ScrewParameters> screws;
    screws.reserve(poses.size());
    for (std::size_t i = 1; i < poses.size(); ++i) {
        screws.push_back(screw_parameters(poses[i] * ref_inv, tol));
    }

    // Axis from the first genuinely rotational sample.
    bool have_axis = false;
    Vec3 dir{0, 0, 1}, pt{0, 0, 0};
    for (const auto& s : screws) {
        if (!s.degenerate && !s.pure_translation) {
            dir = s.axis_direction;
            pt = s.axis_point;
            have_axis = true;
            break;
        }
    }
    double dev = 0;
    if (!have_axis) {
        // Translation-only motion: cylindrical iff all translations are parallel.
        Vec3 first{0, 0, 1};
        bool have_first = false;
        for (const auto& s : screws) {
            if (s.degenerate) continue;
            if (!have_first) {
                first = s.axis_direction;
                have_first = true;
            } else {
                dev = std::max(dev, norm(cross(first, s.axis_direction)));
            }
        }
        out.axis_direction = first;
        out.max_deviation = dev;
        out.cylindrical = dev <= tol;
        return out;
    }

    for (const auto& s : screws) {
        if (s.degenerate) continue;
        Vec3 d2 = s.axis_direction;
        if (dot(d2, dir) < 0) d2 = -d2;
        dev = std::max(dev, norm(cross(d2, dir)));
        if (!s.pure_translation) {
            dev = std::max(dev, norm(cross(s.axis_point - pt, dir)));
        }
    }
    out.axis_direction = dir;
    out.axis_point = pt;
    out.max_deviation = dev;
    out.cylindrical = dev <= tol;
    return out;
}

}  // namespace motionforge
