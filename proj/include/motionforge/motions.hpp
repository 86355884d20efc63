#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "motionforge/algebra.hpp"
#include "motionforge/extmap.hpp"
#include "motionforge/posemodels.hpp"
#include "motionforge/realpoly.hpp"

namespace motionforge {

enum class MotionKind { darboux, cubic, helical, line_symmetric };
enum class RuledSurface { hyperbolic_paraboloid, pluecker_conoid };

// ---------------------------------------------------------------------------
// Screw data of a single displacement.
// ---------------------------------------------------------------------------
struct ScrewParameters {
    double angle = 0;        // in [0, pi]
    double translation = 0;  // signed distance along the axis
    Vec3 axis_direction{0, 0, 1};
    Vec3 axis_point{0, 0, 0};
    bool degenerate = false;        // identity displacement
    bool pure_translation = false;  // angle = 0, translation != 0
};

ScrewParameters screw_parameters(const PoseMatrix& displacement, double tol = kDefaultTolerance);

struct ScrewInvariants {
    Vec3 axis_point{0, 0, 0};
    Vec3 axis_direction{0, 0, 1};
    double angle = 0;
    double translation = 0;
    double pitch = 0;  // dz/domega; +infinity for pure translations
};

// ---------------------------------------------------------------------------
// A pose pair reduced to its cylinder normal form: S conjugates the relative
// displacement B A^{-1} to a rotation by phi about the third axis combined
// with a translation d along it. Any canonical motion c with c(0) = identity
// and c(1) = that normal form lifts back as X(t) = S c(t) S^{-1} A.
// ---------------------------------------------------------------------------
struct CanonicalPair {
    PoseMatrix frame;  // S: canonical third axis -> screw axis of B A^{-1}
    double phi = 0;    // rotation angle, in [0, pi]
    double d = 0;      // translation along the axis
    PoseMatrix A, B;   // originals
    bool degenerate = false;        // A == B
    bool pure_translation = false;  // phi == 0, d != 0

    PoseMatrix canonical_end() const { return PoseMatrix::cylinder_pose(phi, d); }
    Vec3 axis_direction() const { return frame.column(2); }
    Vec3 axis_point() const { return frame.translation; }
};

CanonicalPair canonicalize_pair(const PoseMatrix& A, const PoseMatrix& B, double tol = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Motion curves. Polynomial curves carry exact dual quaternion coefficients;
// the helical interpolant is transcendental and carries a sampler instead.
// ---------------------------------------------------------------------------
struct CubicMeta {
    double m0 = 0, m3 = 0;     // the only selector entries entering the laws
    double aEss = 0, bEss = 0;  // essential fiber scalars
};

struct DarbouxMeta {
    double sA = 0, sB = 0;  // fiber offsets; only sA - sB is essential
};

struct MotionCurve {
    MotionKind kind = MotionKind::darboux;
    DualQuatPoly poly;                              // empty when sampled
    std::function<DualQuaternion(double)> sampler;  // helical interpolants only
    std::array<double, 2> domain{0, 1};
    std::optional<CanonicalPair> pair;
    std::optional<CubicMeta> cubic;
    std::optional<DarbouxMeta> darboux;
    std::optional<RuledSurface> surface;  // line-symmetric motions only

    bool algebraic() const { return !sampler; }
    DualQuaternion at(double t) const;
    PoseMatrix pose_at(double t, double tol = kDefaultTolerance) const;
};

// Linear interpolation in the dual quaternion model between the fiber
// representatives hA + sA eps pA and hB + sB eps pB. The sign of hB is flipped
// first if its primal is antipodal to hA's.
MotionCurve darboux_interpolant(const DualQuaternion& hA, const DualQuaternion& hB,
                                double sA = 0, double sB = 0, double tol = kDefaultTolerance);

// Image of the straight line between fiber points of the pair under the map
// of the selector; exact degree-two coefficients. `allow_pole` skips the
// pole-free guard (1-t)(1+aEss) + t(1+bEss) > 0 on [0, 1].
MotionCurve cubic_interpolant(const CanonicalPair& pair, const MapSelector& m,
                              const FiberOffsets& alpha = {}, const FiberOffsets& beta = {},
                              double tol = kDefaultTolerance, bool allow_pole = false);

struct HelicalResult {
    MotionCurve motion;  // sampled, constant-pitch screw motion
    ScrewInvariants invariants;
};

HelicalResult helical_interpolant(const CanonicalPair& pair, double tol = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Transmission: rotation angle omega(t) and axial translation z(t) inside the
// pair's cylinder group, both measured from the start pose.
// ---------------------------------------------------------------------------
struct TransmissionCurve {
    enum class Law { tangent, sine };
    Law law = Law::sine;

    // tangent law: (p t + q) tan(omega/2) = (r t + s) z
    double p = 0, q = 0, r = 0, s = 0;
    // sine law: z = lambda (sin(omega + kappa) - sin(kappa))
    double lambda = 0, kappa = 0;

    double fit_residual = 0;
    bool degenerate_translation = false;  // omega identically zero
    std::vector<std::array<double, 3>> samples;  // rows (t, omega, z)
};

TransmissionCurve transmission_curve(const MotionCurve& motion, const CanonicalPair& pair,
                                     int n_samples = 257, double tol = kDefaultTolerance);

// Instantaneous pitch dz/domega at t0. Closed forms for the constructed
// interpolants, central differences otherwise. Returns +/-infinity when the
// angular rate vanishes while the translation rate does not.
double pitch_at(const MotionCurve& motion, double t0, double tol = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Interpolant selection.
// ---------------------------------------------------------------------------
struct ThirdPoseConstraint {
    PoseMatrix pose;  // must lie in the pair's cylinder group
};
struct StartPitchConstraint {
    double pitch;
};
struct PitchPairConstraint {
    double start_pitch;
    double end_pitch;
    MapSelector m = MapSelector::from({1, 0, 0, 0});
};
using InterpolantConstraint = std::variant<ThirdPoseConstraint, StartPitchConstraint, PitchPairConstraint>;

MotionCurve select_interpolant(const CanonicalPair& pair, const InterpolantConstraint& constraint,
                               double tol = kDefaultTolerance);

// ---------------------------------------------------------------------------
// Exact point trajectories.
// ---------------------------------------------------------------------------
struct RationalCurve {
    RealPoly w, x, y, z;  // homogeneous [w : x : y : z], content removed

    int degree() const;
    int points_at_infinity(double tol = kDefaultTolerance) const;  // distinct real roots of w
    Vec3 eval(double t) const;
};

RationalCurve trajectory_exact(const MotionCurve& motion, const Vec3& pt, double tol = kDefaultTolerance);

struct TrajectoryDiagnostics {
    int degree = 0;
    int points_at_infinity = 0;
    double circle_residual = 0;   // geometric residual of projection along axis
    double circle_radius = 0;
    double conic_residual = 0;    // algebraic residual of planar conic fit
    double planarity_residual = 0;
    std::string classification;   // ellipse | parabola | hyperbola | segment | point
};

TrajectoryDiagnostics trajectory_diagnostics(const RationalCurve& curve, const Vec3& axis_direction,
                                             int n_samples = 100, double lo = 0.0, double hi = 1.0);

// ---------------------------------------------------------------------------
// Ruled surfaces and line-symmetric motions.
// ---------------------------------------------------------------------------
struct RulingFamily {
    RuledSurface surface = RuledSurface::hyperbolic_paraboloid;
    double par_a = 0, par_b = 0, par_c = 0;
    std::array<RealPoly, 3> direction;  // polynomial Pluecker coordinates
    std::array<RealPoly, 3> moment;

    // Projective Pluecker six-vector at t, scaled to unit max-abs entry.
    std::array<double, 6> pluecker_at(double t) const;
};

RulingFamily ruling_family_paraboloid(double pa, double pb);
RulingFamily ruling_family_conoid(double c);

// Reflection of the moving frame in the rulings: at each parameter the pose is
// the half-turn about the ruling, dir - eps * mom as a dual quaternion.
MotionCurve line_symmetric_motion(const RulingFamily& rulings);

struct CubicFactorization {
    DualQuatPoly F1;  // rotation about an axis parallel to (b, -a, 0)
    DualQuatPoly F2;  // translation in direction (a, -b, 0)
    DualQuaternion leading;
};

CubicFactorization factor_cubic(double pa, double pb);

struct CylinderCheckResult {
    bool cylindrical = false;
    Vec3 axis_point{0, 0, 0};
    Vec3 axis_direction{0, 0, 1};
    double max_deviation = 0;
};

CylinderCheckResult cylinder_check(const MotionCurve& motion, int n_samples = 33,
                                   double tol = kDefaultTolerance);

}  // namespace motionforge
