#include "motionforge/extmap.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace motionforge {

MapSelector MapSelector::from(const std::array<double, 4>& m) {
    if (m[0] == 0 && m[1] == 0 && m[2] == 0 && m[3] == 0) {
        throw UndefinedMap("map selector m = 0");
    }
    MapSelector out;
    out.m = m;
    out.n = {4 * m[0] * m[1] * m[2] * m[3],
             m[0] * m[1] - m[2] * m[3],
             m[0] * m[2] - m[1] * m[3],
             m[0] * m[3] - m[1] * m[2],
             m[0] * m[1] + m[2] * m[3],
             m[0] * m[2] + m[1] * m[3],
             m[0] * m[3] + m[1] * m[2]};
    return out;
}

std::array<double, 4> mu_prime_component(int ell, const std::array<double, 10>& x) {
    return euler_form(ell, x);
}

std::array<double, 4> mu_prime(const MapSelector& m, const std::array<double, 10>& x) {
    std::array<double, 4> out{};
    for (int ell = 0; ell < 4; ++ell) {
        const auto part = euler_form(ell, x);
        for (int i = 0; i < 4; ++i) {
            out[static_cast<std::size_t>(i)] += m.m[static_cast<std::size_t>(ell)] * part[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

std::array<std::array<double, 10>, 4> map_matrix(const MapSelector& m) {
    std::array<std::array<double, 10>, 4> M{};
    std::array<double, 10> e{};
    for (int col = 0; col < 10; ++col) {
        e.fill(0);
        e[static_cast<std::size_t>(col)] = 1;
        const auto image = mu_prime(m, e);
        for (int row = 0; row < 4; ++row) {
            M[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] = image[static_cast<std::size_t>(row)];
        }
    }
    return M;
}

NullspaceBasis nullspace_basis(const MapSelector& m) {
    const auto& n = m.n;
    NullspaceBasis out;
    out.formula = {{
        {n[1] * n[2], -n[2] * n[4], n[0], 0, 0, -n[1] * n[5], 0, 0, 0, n[4] * n[5]},
        {-n[4] * n[6], n[1] * n[6], 0, n[0], 0, -n[1] * n[3], 0, 0, 0, n[3] * n[4]},
        {-n[4] * n[5], n[1] * n[5], 0, 0, n[0], n[2] * n[4], 0, 0, 0, -n[1] * n[2]},
        {n[2] * n[3], n[5] * n[6], 0, 0, 0, -n[3] * n[5], n[0], 0, 0, -n[2] * n[6]},
        {n[1] * n[3], -n[3] * n[4], 0, 0, 0, n[4] * n[6], 0, n[0], 0, -n[1] * n[6]},
        {-n[5] * n[6], -n[2] * n[3], 0, 0, 0, n[2] * n[6], 0, 0, n[0], n[3] * n[5]},
    }};

    Eigen::Matrix<double, 6, 10> F;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 10; ++j) F(i, j) = out.formula[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 10>> svdF(F);
    const double top = svdF.singularValues()(0);
    out.formula_rank = 0;
    for (int i = 0; i < svdF.singularValues().size(); ++i) {
        if (svdF.singularValues()(i) > 1e-12 * std::max(1.0, top)) ++out.formula_rank;
    }

    if (out.formula_rank == 6) {
        out.effective = out.formula;
        return out;
    }

    // Fallback: right singular vectors of the map matrix for the smallest six
    // singular values span the nullspace whenever rank(M_m) = 4.
    out.used_fallback = true;
    const auto M = map_matrix(m);
    Eigen::Matrix<double, 4, 10> Mm;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 10; ++j) Mm(i, j) = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 10>> svdM(Mm, Eigen::ComputeFullV);
    for (int k = 0; k < 6; ++k) {
        for (int j = 0; j < 10; ++j) {
            out.effective[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = svdM.matrixV()(j, 4 + k);
        }
    }
    return out;
}

DualQuaternion mu(const MapSelector& m, const AmbientPose& x, double tol) {
    const auto phat = mu_prime(m, x.rotational());
    const Quaternion p{phat[0], phat[1], phat[2], phat[3]};
    const DualQuaternion image{x.x0() * p, dual_from_primal(p, x.translational())};
    const double scale = std::max(1.0, x.max_abs());
    if (std::sqrt(image.norm_sq_total()) <= tol * scale * scale) {
        throw ZeroImage("mu: ambient point lies in the base set of the map");
    }
    return image;
}

FiberGenerator::FiberGenerator(const MapSelector& m, const AmbientPose& base, double tol)
    : m_(m), base_(base), basis_(nullspace_basis(m)) {
    const auto phat = mu_prime(m, base.rotational());
    const double pn = std::sqrt(phat[0] * phat[0] + phat[1] * phat[1] + phat[2] * phat[2] + phat[3] * phat[3]);
    if (pn <= tol * std::max(1.0, base.max_abs())) {
        throw ZeroImage("fiber: rotational part lies in the base set of the map");
    }
}

AmbientPose FiberGenerator::at(const FiberOffsets& offsets) const {
    const double x0 = base_.x0();
    auto rot = base_.rotational();
    for (int l = 0; l < 6; ++l) {
        for (int j = 0; j < 10; ++j) {
            rot[static_cast<std::size_t>(j)] += offsets[static_cast<std::size_t>(l)] *
                                                basis_.effective[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
        }
    }
    const double psi = rot[0];
    AmbientPose out;
    for (int j = 0; j < 10; ++j) out.c[static_cast<std::size_t>(j)] = x0 * rot[static_cast<std::size_t>(j)];
    const Vec3 a = base_.translational();
    for (int j = 0; j < 3; ++j) out.c[static_cast<std::size_t>(10 + j)] = psi * a[static_cast<std::size_t>(j)];
    return out;
}

double FiberGenerator::psi_perturbation(const FiberOffsets& offsets) const {
    double s = 0;
    for (int l = 0; l < 6; ++l) {
        s += offsets[static_cast<std::size_t>(l)] * basis_.effective[static_cast<std::size_t>(l)][0];
    }
    return s;
}

FiberGenerator fiber(const MapSelector& m, const AmbientPose& x, double tol) {
    return FiberGenerator(m, x, tol);
}

double essential_scalar(const MapSelector& m, const FiberOffsets& o) {
    const auto& n = m.n;
    return n[1] * n[2] * o[0] - n[4] * n[6] * o[1] - n[4] * n[5] * o[2] +
           n[2] * n[3] * o[3] + n[1] * n[3] * o[4] - n[5] * n[6] * o[5];
}

DualQuatPoly mu_poly(const MapSelector& m, const std::vector<AmbientPose>& coeffs) {
    const std::size_t n = coeffs.size();
    if (n == 0) return {};

    std::vector<Quaternion> phat(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto v = mu_prime(m, coeffs[i].rotational());
        phat[i] = {v[0], v[1], v[2], v[3]};
    }

    std::vector<DualQuaternion> out(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // primal: x0_i * phat_j; dual: (1/2) Q(a_i) phat_j
            out[i + j].p = out[i + j].p + coeffs[i].x0() * phat[j];
            out[i + j].q = out[i + j].q + dual_from_primal(phat[j], coeffs[i].translational());
        }
    }
    return DualQuatPoly(std::move(out));
}

}  // namespace motionforge
