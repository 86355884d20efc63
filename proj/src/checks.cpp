#include "motionforge/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "motionforge/bezier.hpp"
#include "motionforge/extmap.hpp"
#include "motionforge/motions.hpp"
#include "motionforge/posemodels.hpp"

namespace motionforge::checks {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(gen); }

    Quaternion rotation() {
        Quaternion p{gauss(), gauss(), gauss(), gauss()};
        return (1.0 / p.norm()) * p;
    }
    Vec3 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }

    DualQuaternion displacement(double box) {
        const Quaternion p = rotation();
        return {p, dual_from_primal(p, vec(-box, box))};
    }
    PoseMatrix pose(double box) { return dq_to_matrix(displacement(box)); }

    MapSelector selector() {
        // All components bounded away from zero so every n_i is generic.
        std::array<double, 4> m;
        for (auto& v : m) {
            do {
                v = uniform(-1, 1);
            } while (std::abs(v) < 0.05);
        }
        return MapSelector::from(m);
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

CriterionResult make_result(int id, const std::string& name, bool passed, const std::string& detail) {
    return {id, name, passed, detail};
}

// Realize a target essential scalar as fiber offsets along the best basis vector.
FiberOffsets offsets_for_essential(const NullspaceBasis& basis, double value) {
    int best = 0;
    for (int l = 1; l < 6; ++l) {
        if (std::abs(basis.effective[static_cast<std::size_t>(l)][0]) >
            std::abs(basis.effective[static_cast<std::size_t>(best)][0])) {
            best = l;
        }
    }
    FiberOffsets out{};
    out[static_cast<std::size_t>(best)] = value / basis.effective[static_cast<std::size_t>(best)][0];
    return out;
}

double max_pose_path_distance(const MotionCurve& a, const MotionCurve& b, int n) {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        worst = std::max(worst, pose_distance(a.pose_at(t), b.pose_at(t)));
    }
    return worst;
}

// ------------------------------------------------------------------ 1
CriterionResult criterion_conversion_round_trip(double tol) {
    Rng rng(101);
    double worst_dist = 0, worst_res = 0;
    for (int i = 0; i < 10000; ++i) {
        const DualQuaternion h = rng.displacement(10.0);
        const PoseMatrix P = dq_to_matrix(h, tol);
        const DualQuaternion h2 = matrix_to_dq(P, tol);
        worst_dist = std::max(worst_dist, projective_distance(h, h2));
        worst_res = std::max(worst_res, std::abs(study_residual(h2)));
    }
    const bool ok = worst_dist <= 1e-9 && worst_res <= 1e-12;
    return make_result(1, "conversion round trip",
                       ok, "projective distance " + fmt(worst_dist) + ", Study residual " + fmt(worst_res));
}

// ------------------------------------------------------------------ 2
CriterionResult criterion_nullspace(double) {
    Rng rng(202);
    double worst_annihilation = 0;
    bool dims_ok = true;
    for (int trial = 0; trial < 100; ++trial) {
        const MapSelector m = rng.selector();
        const auto M = map_matrix(m);
        const auto basis = nullspace_basis(m);
        for (const auto& f : basis.formula) {
            for (int row = 0; row < 4; ++row) {
                double s = 0;
                for (int col = 0; col < 10; ++col) {
                    s += M[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] *
                         f[static_cast<std::size_t>(col)];
                }
                worst_annihilation = std::max(worst_annihilation, std::abs(s));
            }
        }
        bool all_n_nonzero = true;
        for (double nv : m.n) {
            if (nv == 0) all_n_nonzero = false;
        }
        if (all_n_nonzero) {
            Eigen::Matrix<double, 4, 10> Mm;
            for (int i = 0; i < 4; ++i) {
                for (int j = 0; j < 10; ++j) {
                    Mm(i, j) = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                }
            }
            Eigen::JacobiSVD<Eigen::Matrix<double, 4, 10>> svd(Mm);
            int rank = 0;
            for (int i = 0; i < svd.singularValues().size(); ++i) {
                if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
            }
            if (10 - rank != 6) dims_ok = false;
        }
    }
    const auto worked = nullspace_basis(MapSelector::from({1, 1, 1, 1}));
    const std::array<double, 10> expected{0, 0, 4, 0, 0, 0, 0, 0, 0, 4};
    bool worked_ok = true;
    for (int j = 0; j < 10; ++j) {
        if (worked.formula[0][static_cast<std::size_t>(j)] != expected[static_cast<std::size_t>(j)])
            worked_ok = false;
    }
    const bool ok = worst_annihilation <= 1e-12 && dims_ok && worked_ok;
    return make_result(2, "nullspace annihilation",
                       ok, "max |M_m f_i| " + fmt(worst_annihilation) + ", dims " +
                               (dims_ok ? "6" : "bad") + ", worked value " + (worked_ok ? "exact" : "bad"));
}

// ------------------------------------------------------------------ 3
CriterionResult criterion_fiber_constancy(double tol) {
    Rng rng(303);
    double worst = 0;
    bool base_set_ok = true;
    for (int trial = 0; trial < 10; ++trial) {
        const MapSelector m = rng.selector();
        const AmbientPose X = AmbientPose::embed(rng.pose(2.0));
        const FiberGenerator gen(m, X, tol);
        const DualQuaternion base = mu(m, X, tol);
        for (int k = 0; k < 100; ++k) {
            FiberOffsets alpha;
            for (auto& v : alpha) v = rng.uniform(-0.5, 0.5);
            const double psi = X.x0() + gen.psi_perturbation(alpha);
            if (std::abs(psi) < 1e-3) continue;  // too close to the base set
            const DualQuaternion image = mu(m, gen.at(alpha), tol);
            worst = std::max(worst, projective_distance(base, image));
        }
        // An offset chosen on the base set must raise ZeroImage.
        const auto on_base = offsets_for_essential(gen.basis(), -X.x0());
        try {
            (void)mu(m, gen.at(on_base), tol);
            base_set_ok = false;
        } catch (const ZeroImage&) {
        }
    }
    const bool ok = worst <= 1e-9 && base_set_ok;
    return make_result(3, "fiber constancy", ok,
                       "max projective distance " + fmt(worst) + ", base set " +
                           (base_set_ok ? "raises ZeroImage" : "MISSED"));
}

// ------------------------------------------------------------------ 4
CriterionResult criterion_study_containment(double tol) {
    Rng rng(404);
    double worst = 0;
    int used = 0;
    while (used < 1000) {
        const MapSelector m = rng.selector();
        AmbientPose x;
        for (auto& v : x.c) v = rng.uniform(-1, 1);
        try {
            const DualQuaternion image = mu(m, x, tol);
            worst = std::max(worst, std::abs(study_residual(image)) / std::max(1.0, image.norm_sq_total()));
            ++used;
        } catch (const ZeroImage&) {
            continue;
        }
    }
    const bool ok = worst <= 1e-12;
    return make_result(4, "Study containment of extended map", ok, "max relative residual " + fmt(worst));
}

// ------------------------------------------------------------------ 5
CriterionResult criterion_eq16_structure(double tol) {
    Rng rng(505);
    double worst_sparse = 0, worst_match = 0, worst_rem = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double phi = rng.uniform(0.2, 2.9);
        const double d = rng.uniform(0.3, 2.0) * (rng.uniform(-1, 1) < 0 ? -1 : 1);
        const MapSelector m = rng.selector();
        const auto basis = nullspace_basis(m);
        const double aEss = rng.uniform(-0.6, 1.0);
        const double bEss = rng.uniform(-0.6, 1.0);
        const auto alpha = offsets_for_essential(basis, aEss);
        const auto beta = offsets_for_essential(basis, bEss);

        const auto pair = canonicalize_pair(PoseMatrix::identity(), PoseMatrix::cylinder_pose(phi, d), tol);
        const MotionCurve motion = cubic_interpolant(pair, m, alpha, beta, tol);
        const auto& c = motion.poly;
        const double scale = c.max_coeff_norm();

        // sparsity: coordinates 1, 2, 5, 6 vanish identically
        for (std::size_t i = 0; i < c.size(); ++i) {
            worst_sparse = std::max({worst_sparse, std::abs(c[i].p.x) / scale, std::abs(c[i].p.y) / scale,
                                     std::abs(c[i].q.x) / scale, std::abs(c[i].q.y) / scale});
        }

        // closed forms
        const double m0 = m.m[0], m3 = m.m[3];
        const double W = m0 * (std::cos(phi) - 1) + m3 * std::sin(phi);
        const double V = m3 * (std::cos(phi) - 1) - m0 * std::sin(phi);
        const double g10 = -2 * (1 + aEss), g11 = -2 * (bEss - aEss);
        const double gz = d * (1 + bEss);
        const double c0e[3] = {-g10 * 2 * m0, -(g10 * W + g11 * 2 * m0), -g11 * W};
        const double c3e[3] = {0, g10 * V, g11 * V};
        const double c4e[3] = {0, 0, -gz * V};
        const double c7e[3] = {0, -2 * m0 * gz, -gz * W};
        for (int i = 0; i < 3; ++i) {
            const auto& coef = c[static_cast<std::size_t>(i)];
            worst_match = std::max({worst_match, std::abs(coef.p.w - c0e[i]) / scale,
                                    std::abs(coef.p.z - c3e[i]) / scale, std::abs(coef.q.w - c4e[i]) / scale,
                                    std::abs(coef.q.z - c7e[i]) / scale});
        }

        // primal content divisible by g1
        const RealPoly g1({g10, g11});
        const RealPoly c0p({c[0].p.w, c[1].p.w, c[2].p.w});
        const RealPoly c3p({c[0].p.z, c[1].p.z, c[2].p.z});
        for (const auto& poly : {c0p, c3p}) {
            const auto division = poly_divide(poly, g1);
            worst_rem = std::max(worst_rem, division.remainder.max_abs_coeff() / scale);
        }
    }
    const bool ok = worst_sparse <= 1e-12 && worst_match <= 1e-10 && worst_rem <= 1e-12;
    return make_result(5, "cubic coordinate structure", ok,
                       "sparsity " + fmt(worst_sparse) + ", closed forms " + fmt(worst_match) +
                           ", g1 remainder " + fmt(worst_rem));
}

// ------------------------------------------------------------------ 6
CriterionResult criterion_transmission(double tol) {
    Rng rng(606);
    double worst_tan = 0, worst_sine = 0, worst_end = 0, worst_m_indep = 0;

    for (int trial = 0; trial < 20; ++trial) {
        const double phi = rng.uniform(0.3, 2.8);
        const double d = rng.uniform(0.3, 2.0);
        const auto pair = canonicalize_pair(PoseMatrix::identity(), PoseMatrix::cylinder_pose(phi, d), tol);
        const MapSelector m = rng.selector();
        const auto basis = nullspace_basis(m);
        const auto alpha = offsets_for_essential(basis, rng.uniform(-0.5, 0.8));
        const auto beta = offsets_for_essential(basis, rng.uniform(-0.5, 0.8));
        const MotionCurve cubicM = cubic_interpolant(pair, m, alpha, beta, tol);
        const TransmissionCurve tc = transmission_curve(cubicM, pair, 1001, tol);
        worst_tan = std::max(worst_tan, tc.fit_residual);
        const auto& last = tc.samples.back();
        // rotation angles compare modulo 2*pi (selectors with K/m0 < 0 wind the other way)
        worst_end = std::max({worst_end, std::abs(std::remainder(last[1] - phi, 2 * kPi)),
                              std::abs(last[2] - d)});

        // endpoint rotation independent of the selector
        const DualQuaternion end = cubicM.poly.eval(1.0);
        const double denom = std::hypot(end.p.w, end.p.z);
        worst_m_indep = std::max(worst_m_indep,
                                 std::abs(end.p.z * std::cos(phi / 2) - end.p.w * std::sin(phi / 2)) / denom);

        const MotionCurve darbouxM =
            darboux_interpolant(matrix_to_dq(pair.A), matrix_to_dq(pair.B), rng.uniform(-0.8, 0.8),
                                rng.uniform(-0.8, 0.8), tol);
        const TransmissionCurve ts = transmission_curve(darbouxM, pair, 1001, tol);
        worst_sine = std::max(worst_sine, ts.fit_residual);
        const auto& lastd = ts.samples.back();
        worst_end = std::max({worst_end, std::abs(lastd[1] - phi), std::abs(lastd[2] - d)});
        worst_end = std::max({worst_end, std::abs(ts.samples.front()[1]), std::abs(ts.samples.front()[2])});
    }
    const bool ok = worst_tan <= 1e-9 && worst_sine <= 1e-9 && worst_end <= 1e-9 && worst_m_indep <= 1e-12;
    return make_result(6, "transmission laws", ok,
                       "tangent " + fmt(worst_tan) + ", sine " + fmt(worst_sine) + ", endpoints " +
                           fmt(worst_end) + ", m-independence " + fmt(worst_m_indep));
}

// ------------------------------------------------------------------ 7
CriterionResult criterion_trajectory_degrees(double tol) {
    Rng rng(707);
    bool degrees_ok = true;
    double worst_circle = 0;
    bool ellipse_ok = true;

    const double phi = 1.1, d = 0.8;
    const auto pair = canonicalize_pair(PoseMatrix::identity(), PoseMatrix::cylinder_pose(phi, d), tol);

    const MotionCurve darb = darboux_interpolant(matrix_to_dq(pair.A), matrix_to_dq(pair.B), 0.4, -0.2, tol);
    const MapSelector m = MapSelector::from({0.9, -0.3, 0.45, 0.7});
    const auto basis = nullspace_basis(m);
    const MotionCurve cub = cubic_interpolant(pair, m, offsets_for_essential(basis, 0.25),
                                              offsets_for_essential(basis, -0.15), tol);

    for (int k = 0; k < 20; ++k) {
        const Vec3 pt = rng.vec(-1, 1);
        const RationalCurve td = trajectory_exact(darb, pt, tol);
        if (td.degree() != 2) degrees_ok = false;
        const auto diag_d = trajectory_diagnostics(td, pair.axis_direction());
        if (diag_d.classification != "ellipse" || diag_d.conic_residual > 1e-9) ellipse_ok = false;

        const RationalCurve tc = trajectory_exact(cub, pt, tol);
        if (tc.degree() != 3) degrees_ok = false;
        const auto diag_c = trajectory_diagnostics(tc, pair.axis_direction());
        worst_circle = std::max(worst_circle, diag_c.circle_residual);
    }
    const bool ok = degrees_ok && worst_circle <= 1e-9 && ellipse_ok;
    return make_result(7, "trajectory degrees and shapes", ok,
                       std::string("degrees ") + (degrees_ok ? "2/3" : "bad") + ", circle residual " +
                           fmt(worst_circle) + ", darboux conics " + (ellipse_ok ? "ellipses" : "bad"));
}

// ------------------------------------------------------------------ 8
CriterionResult criterion_factorization(double tol) {
    Rng rng(808);
    double worst_coeff = 0;
    bool cylinder_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        double pa = rng.uniform(-2, 2), pb = rng.uniform(-2, 2);
        if (std::abs(pa) < 0.1) pa = 0.35;
        if (std::abs(pb) < 0.1) pb = -0.55;
        const auto fac = factor_cubic(pa, pb);
        const DualQuatPoly product = fac.leading * (fac.F1 * fac.F2);
        const MotionCurve motion = line_symmetric_motion(ruling_family_paraboloid(pa, pb));
        const double scale = motion.poly.max_coeff_norm();
        for (std::size_t i = 0; i < 3; ++i) {
            const DualQuaternion diff = product[i] - motion.poly[i];
            worst_coeff = std::max(worst_coeff, std::sqrt(diff.norm_sq_total()) / scale);
        }
        const bool want_cyl = std::abs(std::abs(pa) - std::abs(pb)) <= 1e-12;
        const auto check = cylinder_check(motion, 33, tol);
        if (check.cylindrical != want_cyl) cylinder_ok = false;
    }
    // explicit a = b, a = -b, a != +/-b cases
    for (const auto& [pa, pb, want] : {std::tuple{1.0, 1.0, true}, {1.0, -1.0, true}, {1.0, 2.0, false}}) {
        const auto check = cylinder_check(line_symmetric_motion(ruling_family_paraboloid(pa, pb)), 33, tol);
        if (check.cylindrical != want) cylinder_ok = false;
    }
    const bool ok = worst_coeff <= 1e-12 && cylinder_ok;
    return make_result(8, "factorization and cylinder criterion", ok,
                       "coefficient mismatch " + fmt(worst_coeff) + ", cylinder iff pa = +/-pb " +
                           (cylinder_ok ? "holds" : "fails"));
}

// ------------------------------------------------------------------ 9
CriterionResult criterion_selection(double tol) {
    Rng rng(909);
    double worst_recover = 0;
    bool pitch_ok = true, reject_ok = true, distinct_ok = true;

    for (int trial = 0; trial < 10; ++trial) {
        const double phi = rng.uniform(0.5, 2.5);
        const double d = rng.uniform(0.4, 1.8);
        const auto pair = canonicalize_pair(PoseMatrix::identity(), PoseMatrix::cylinder_pose(phi, d), tol);
        const double sA = rng.uniform(-0.7, 0.7);
        const MotionCurve planted = darboux_interpolant(matrix_to_dq(pair.A), matrix_to_dq(pair.B), sA, 0, tol);
        const PoseMatrix third = planted.pose_at(0.5);
        const MotionCurve recovered = select_interpolant(pair, ThirdPoseConstraint{third}, tol);
        worst_recover = std::max(worst_recover, max_pose_path_distance(planted, recovered, 21));
    }

    {
        const auto pair = canonicalize_pair(PoseMatrix::identity(), PoseMatrix::cylinder_pose(kPi / 2, 1.0), tol);
        const MapSelector m = MapSelector::from({1, 0.2, -0.3, 0.4});
        // pitch product for this pair is pinned to 1/2
        for (const auto& [p0, p1] : {std::pair{1.0, 0.5}, {2.0, 0.25}, {0.25, 2.0}}) {
            const MotionCurve sel = select_interpolant(pair, PitchPairConstraint{p0, p1, m}, tol);
            if (std::abs(pitch_at(sel, 0, tol) - p0) > 1e-8) pitch_ok = false;
            if (std::abs(pitch_at(sel, 1, tol) - p1) > 1e-8) pitch_ok = false;
        }
        try {
            (void)select_interpolant(pair, PitchPairConstraint{1.0, -0.5, m}, tol);
            reject_ok = false;
        } catch (const PitchPairInfeasible&) {
        }

        // ten distinct essential pairs -> ten pairwise distinct motions through the endpoints
        const auto basis = nullspace_basis(m);
        std::vector<MotionCurve> family;
        for (int k = 0; k < 10; ++k) {
            const double b = 0.08 * static_cast<double>(k);
            family.push_back(
                cubic_interpolant(pair, m, FiberOffsets{}, offsets_for_essential(basis, b), tol));
            if (pose_distance(family.back().pose_at(0), pair.A) > 1e-9 ||
                pose_distance(family.back().pose_at(1), pair.B) > 1e-9) {
                distinct_ok = false;
            }
        }
        for (std::size_t i = 0; i < family.size(); ++i) {
            for (std::size_t j = i + 1; j < family.size(); ++j) {
                if (projectively_equal(family[i].poly, family[j].poly, 1e-9)) distinct_ok = false;
            }
        }
    }
    const bool ok = worst_recover <= 1e-9 && pitch_ok && reject_ok && distinct_ok;
    return make_result(9, "interpolant selection", ok,
                       "third-pose recovery " + fmt(worst_recover) + ", pitch pairs " +
                           (pitch_ok ? "match" : "bad") + ", opposite-sign rejection " +
                           (reject_ok ? "raises" : "MISSED") + ", family " +
                           (distinct_ok ? "distinct" : "collapsed"));
}

// ------------------------------------------------------------------ 10
CriterionResult criterion_bezier(double tol) {
    Rng rng(1010);
    double worst_eq = 0, worst_sub = 0, worst_end = 0;

    const double phi = 0.9, d = 1.3;
    const auto pair = canonicalize_pair(PoseMatrix::identity(), PoseMatrix::cylinder_pose(phi, d), tol);
    const MapSelector m = MapSelector::from({0.8, 0.1, -0.25, 0.5});

    {
        ControlPolygon two;
        two.points = {AmbientPose::embed(pair.A), AmbientPose::embed(pair.canonical_end())};
        const MotionCurve viaBezier = bezier_motion(two, m, tol);
        const MotionCurve direct = cubic_interpolant(pair, m, {}, {}, tol);
        worst_eq = std::max(worst_eq, max_pose_path_distance(viaBezier, direct, 21));
        if (!projectively_equal(viaBezier.poly, direct.poly, 1e-10)) worst_eq = std::max(worst_eq, 1.0);
    }

    {
        ControlPolygon cp;
        for (int i = 0; i < 4; ++i) cp.points.push_back(AmbientPose::embed(rng.pose(1.0)));
        const MotionCurve full = bezier_motion(cp, m, tol);
        const auto [leftPoly, rightPoly] = bezier_subdivide(cp, 0.5);
        const MotionCurve left = bezier_motion(leftPoly, m, tol);
        const MotionCurve right = bezier_motion(rightPoly, m, tol);
        for (int i = 0; i < 20; ++i) {
            const double u = static_cast<double>(i) / 19.0;
            worst_sub = std::max(worst_sub, pose_distance(left.pose_at(u), full.pose_at(0.5 * u)));
            worst_sub = std::max(worst_sub, pose_distance(right.pose_at(u), full.pose_at(0.5 + 0.5 * u)));
        }
        worst_end = std::max(worst_end, pose_distance(full.pose_at(0), cp.points.front().restrict_to_pose()));
        worst_end = std::max(worst_end, pose_distance(full.pose_at(1), cp.points.back().restrict_to_pose()));
    }
    const bool ok = worst_eq <= 1e-10 && worst_sub <= 1e-10 && worst_end <= 1e-10;
    return make_result(10, "bezier motions", ok,
                       "two-point vs cubic " + fmt(worst_eq) + ", subdivision " + fmt(worst_sub) +
                           ", endpoints " + fmt(worst_end));
}

}  // namespace

CriterionResult run_criterion(int id, double tol) {
    switch (id) {
        case 1: return criterion_conversion_round_trip(tol);
        case 2: return criterion_nullspace(tol);
        case 3: return criterion_fiber_constancy(tol);
        case 4: return criterion_study_containment(tol);
        case 5: return criterion_eq16_structure(tol);
        case 6: return criterion_transmission(tol);
        case 7: return criterion_trajectory_degrees(tol);
        case 8: return criterion_factorization(tol);
        case 9: return criterion_selection(tol);
        case 10: return criterion_bezier(tol);
        default: throw InvalidInput("unknown criterion id " + std::to_string(id));
    }
}

std::vector<CriterionResult> run_all(double tol) {
    std::vector<CriterionResult> out;
    out.reserve(10);
    for (int id = 1; id <= 10; ++id) out.push_back(run_criterion(id, tol));
    return out;
}

}  // namespace motionforge::checks
