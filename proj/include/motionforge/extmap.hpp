#pragma once

#include <array>
#include <vector>

#include "motionforge/algebra.hpp"
#include "motionforge/posemodels.hpp"

namespace motionforge {

using FiberOffsets = std::array<double, 6>;

// ---------------------------------------------------------------------------
// One member of the extended map family, fixed by the homogeneous vector m.
// The derived seven scalars n0..n6 drive the nullspace basis and the
// essential fiber scalars.
// ---------------------------------------------------------------------------
struct MapSelector {
    std::array<double, 4> m{1, 0, 0, 0};
    std::array<double, 7> n{};

    static MapSelector from(const std::array<double, 4>& m);  // throws UndefinedMap on m = 0
};

// The four candidate linear forms; identical to the tuples of euler_ratios.
std::array<double, 4> mu_prime_component(int ell, const std::array<double, 10>& x);

// m0 mu'_0(x) + m1 mu'_1(x) + m2 mu'_2(x) + m3 mu'_3(x).
std::array<double, 4> mu_prime(const MapSelector& m, const std::array<double, 10>& x);

// Explicit 4x10 matrix representation of mu'_m.
std::array<std::array<double, 10>, 4> map_matrix(const MapSelector& m);

// ---------------------------------------------------------------------------
// Nullspace of the 4x10 map matrix. The closed-form vectors may collapse for
// selectors with vanishing n_i (they even all vanish for m = (1,0,0,0)); the
// effective basis falls back to an SVD nullspace in that case so that fibers
// stay six-dimensional whenever the matrix has full rank.
// ---------------------------------------------------------------------------
struct NullspaceBasis {
    std::array<std::array<double, 10>, 6> formula{};    // closed-form vectors
    std::array<std::array<double, 10>, 6> effective{};  // basis actually spanning the nullspace
    int formula_rank = 0;
    bool used_fallback = false;
};

NullspaceBasis nullspace_basis(const MapSelector& m);

// ---------------------------------------------------------------------------
// The extended kinematic map itself: homogeneous quadratic on R^13,
//   x -> (x0 * mu'_m(xrot), 1/2 Q(a) mu'_m(xrot)).
// On the chart x0 = 1 this is the affine map of the conversion formulas; the
// dual part satisfies the Study condition identically by skew-symmetry.
// ---------------------------------------------------------------------------
DualQuaternion mu(const MapSelector& m, const AmbientPose& x, double tol = kDefaultTolerance);

// Affine generator of the fiber through X: offsets alpha map to
//   y(alpha)[0..9]  = x0 * (xrot + sum alpha_l f_l)
//   y(alpha)[10..12] = psi(alpha) * (a1,a2,a3),  psi = x0 + sum alpha_l f_l[0].
// All samples with nonzero image produce the same displacement.
class FiberGenerator {
public:
    FiberGenerator(const MapSelector& m, const AmbientPose& base, double tol = kDefaultTolerance);

    AmbientPose at(const FiberOffsets& offsets) const;
    // Perturbation of the homogenizing coordinate; equals the essential scalar
    // whenever the closed-form basis is in effect.
    double psi_perturbation(const FiberOffsets& offsets) const;

    const MapSelector& selector() const { return m_; }
    const AmbientPose& base() const { return base_; }
    const NullspaceBasis& basis() const { return basis_; }

private:
    MapSelector m_;
    AmbientPose base_;
    NullspaceBasis basis_;
};

FiberGenerator fiber(const MapSelector& m, const AmbientPose& x, double tol = kDefaultTolerance);

// The bilinear form that condenses six fiber offsets into the one scalar that
// enters the interpolant (the perturbation of the homogenizer).
double essential_scalar(const MapSelector& m, const FiberOffsets& offsets);

// mu applied coefficientwise-exactly to a polynomial curve of ambient points:
//   primal(t) = x0(t) * mu'_m(xrot(t)),   dual(t) = 1/2 Q(a(t)) mu'_m(xrot(t)).
// Degree doubles; no sampling involved.
DualQuatPoly mu_poly(const MapSelector& m, const std::vector<AmbientPose>& coeffs);

}  // namespace motionforge
