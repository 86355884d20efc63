#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "motionforge/extmap.hpp"
#include "motionforge/motions.hpp"
#include "motionforge/posemodels.hpp"

using namespace motionforge;

namespace {

std::mt19937_64 rng(4242);
double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

MapSelector random_selector() {
    std::array<double, 4> m;
    for (auto& v : m) {
        do {
            v = uni(-1, 1);
        } while (std::abs(v) < 0.05);
    }
    return MapSelector::from(m);
}

PoseMatrix random_pose(double box = 2.0) {
    Quaternion p{uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1)};
    p = (1.0 / p.norm()) * p;
    return dq_to_matrix(DualQuaternion{p, dual_from_primal(p, {uni(-box, box), uni(-box, box), uni(-box, box)})});
}

std::array<double, 10> identity_rot() {
    return AmbientPose::embed(PoseMatrix::identity()).rotational();
}

Eigen::Matrix<double, 4, 10> to_eigen(const std::array<std::array<double, 10>, 4>& M) {
    Eigen::Matrix<double, 4, 10> out;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 10; ++j) out(i, j) = M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace

TEST_CASE("selector derived scalars") {
    CHECK_THROWS_AS(MapSelector::from({0, 0, 0, 0}), UndefinedMap);
    const MapSelector m = MapSelector::from({1, 2, 3, 4});
    CHECK(m.n[0] == 4.0 * 1 * 2 * 3 * 4);
    CHECK(m.n[1] == 1.0 * 2 - 3.0 * 4);
    CHECK(m.n[2] == 1.0 * 3 - 2.0 * 4);
    CHECK(m.n[3] == 1.0 * 4 - 2.0 * 3);
    CHECK(m.n[4] == 1.0 * 2 + 3.0 * 4);
    CHECK(m.n[5] == 1.0 * 3 + 2.0 * 4);
    CHECK(m.n[6] == 1.0 * 4 + 2.0 * 3);
}

TEST_CASE("component maps on the identity embedding") {
    const auto x = identity_rot();
    const auto t0 = mu_prime_component(0, x);
    CHECK(t0[0] == 4);
    CHECK(t0[1] == 0);
    CHECK(t0[2] == 0);
    CHECK(t0[3] == 0);
    const auto t3 = mu_prime_component(3, x);
    for (double v : t3) CHECK(v == 0);
}

TEST_CASE("mu_prime is linear and matches its matrix") {
    const auto e0 = MapSelector::from({1, 0, 0, 0});
    for (int trial = 0; trial < 20; ++trial) {
        std::array<double, 10> x;
        for (auto& v : x) v = uni(-2, 2);
        const auto direct = mu_prime(e0, x);
        const auto comp = mu_prime_component(0, x);
        for (int i = 0; i < 4; ++i) {
            CHECK(direct[static_cast<std::size_t>(i)] == comp[static_cast<std::size_t>(i)]);
        }

        const MapSelector a = random_selector();
        const MapSelector b = random_selector();
        std::array<double, 4> sum_m;
        for (int i = 0; i < 4; ++i) {
            sum_m[static_cast<std::size_t>(i)] =
                a.m[static_cast<std::size_t>(i)] + b.m[static_cast<std::size_t>(i)];
        }
        const auto lhs = mu_prime(MapSelector::from(sum_m), x);
        const auto ra = mu_prime(a, x);
        const auto rb = mu_prime(b, x);
        for (int i = 0; i < 4; ++i) {
            CHECK(std::abs(lhs[static_cast<std::size_t>(i)] - ra[static_cast<std::size_t>(i)] -
                           rb[static_cast<std::size_t>(i)]) <= 1e-12);
        }

        const auto M = map_matrix(a);
        for (int row = 0; row < 4; ++row) {
            double s = 0;
            for (int col = 0; col < 10; ++col) {
                s += M[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] *
                     x[static_cast<std::size_t>(col)];
            }
            CHECK(std::abs(s - ra[static_cast<std::size_t>(row)]) <= 1e-12);
        }
    }
}

TEST_CASE("map matrix rows and rank") {
    const auto M = map_matrix(MapSelector::from({1, 0, 0, 0}));
    const std::array<double, 10> row0{1, 1, 0, 0, 0, 1, 0, 0, 0, 1};
    for (int j = 0; j < 10; ++j) {
        CHECK(M[0][static_cast<std::size_t>(j)] == row0[static_cast<std::size_t>(j)]);
    }

    for (int trial = 0; trial < 20; ++trial) {
        const MapSelector m = random_selector();
        Eigen::JacobiSVD<Eigen::Matrix<double, 4, 10>> svd(to_eigen(map_matrix(m)));
        int rank = 0;
        for (int i = 0; i < 4; ++i) {
            if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
        }
        CHECK(rank == 4);
    }
}

TEST_CASE("closed-form nullspace vectors annihilate the map matrix") {
    const auto ones = nullspace_basis(MapSelector::from({1, 1, 1, 1}));
    const std::array<double, 10> expected{0, 0, 4, 0, 0, 0, 0, 0, 0, 4};
    for (int j = 0; j < 10; ++j) {
        CHECK(ones.formula[0][static_cast<std::size_t>(j)] == expected[static_cast<std::size_t>(j)]);
    }

    for (int trial = 0; trial < 100; ++trial) {
        const MapSelector m = random_selector();
        const auto M = map_matrix(m);
        const auto basis = nullspace_basis(m);
        CHECK(basis.formula_rank == 6);
        CHECK(!basis.used_fallback);
        for (const auto& f : basis.formula) {
            for (int row = 0; row < 4; ++row) {
                double s = 0;
                for (int col = 0; col < 10; ++col) {
                    s += M[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] *
                         f[static_cast<std::size_t>(col)];
                }
                CHECK(std::abs(s) <= 1e-12);
            }
        }
        Eigen::JacobiSVD<Eigen::Matrix<double, 4, 10>> svd(to_eigen(M));
        int rank = 0;
        for (int i = 0; i < 4; ++i) {
            if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
        }
        CHECK(10 - rank == 6);
    }
}

TEST_CASE("degenerate selectors fall back to a computed nullspace") {
    // all seven derived scalars vanish for the first unit vector
    const MapSelector e0 = MapSelector::from({1, 0, 0, 0});
    for (double nv : e0.n) CHECK(nv == 0);
    const auto basis = nullspace_basis(e0);
    CHECK(basis.formula_rank == 0);
    CHECK(basis.used_fallback);
    const auto M = map_matrix(e0);
    Eigen::Matrix<double, 6, 10> F;
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 10; ++j) {
            F(i, j) = basis.effective[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 10>> svd(F);
    CHECK(svd.singularValues()(5) > 1e-10);  // six independent directions
    for (const auto& f : basis.effective) {
        for (int row = 0; row < 4; ++row) {
            double s = 0;
            for (int col = 0; col < 10; ++col) {
                s += M[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)] *
                     f[static_cast<std::size_t>(col)];
            }
            CHECK(std::abs(s) <= 1e-12);
        }
    }
}

TEST_CASE("extended map inverts the embedding and lands on the Study quadric") {
    const MapSelector e0 = MapSelector::from({1, 0, 0, 0});
    const DualQuaternion id = mu(e0, AmbientPose::embed(PoseMatrix::identity()));
    CHECK(projective_distance(id, DualQuaternion::identity()) <= 1e-15);

    for (int trial = 0; trial < 50; ++trial) {
        const MapSelector m = random_selector();
        const PoseMatrix P = random_pose();
        const DualQuaternion viaMap = mu(m, AmbientPose::embed(P));
        const DualQuaternion viaConversion = matrix_to_dq(P);
        CHECK(projective_distance(viaMap, viaConversion) <= 1e-9);
    }

    for (int trial = 0; trial < 100; ++trial) {
        const MapSelector m = random_selector();
        AmbientPose x;
        for (auto& v : x.c) v = uni(-1, 1);
        try {
            const DualQuaternion image = mu(m, x);
            CHECK(std::abs(study_residual(image)) / std::max(1.0, image.norm_sq_total()) <= 1e-12);
        } catch (const ZeroImage&) {
        }
    }
}

TEST_CASE("fibers keep the image projectively constant") {
    for (int trial = 0; trial < 5; ++trial) {
        const MapSelector m = random_selector();
        const AmbientPose X = AmbientPose::embed(random_pose());
        const FiberGenerator gen = fiber(m, X);
        const DualQuaternion base = mu(m, X);

        FiberOffsets zero{};
        CHECK(projective_distance(mu(m, gen.at(zero)), base) <= 1e-12);

        for (int k = 0; k < 50; ++k) {
            FiberOffsets alpha;
            for (auto& v : alpha) v = uni(-0.4, 0.4);
            if (std::abs(X.x0() + gen.psi_perturbation(alpha)) < 1e-3) continue;
            CHECK(projective_distance(mu(m, gen.at(alpha)), base) <= 1e-9);
        }

        // the affine generator spans six directions
        Eigen::Matrix<double, 6, 10> F;
        for (int i = 0; i < 6; ++i) {
            for (int j = 0; j < 10; ++j) {
                F(i, j) = gen.basis().effective[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
        Eigen::JacobiSVD<Eigen::Matrix<double, 6, 10>> svd(F);
        CHECK(svd.singularValues()(5) > 1e-10 * svd.singularValues()(0));
    }

    // a sample on the base set must raise ZeroImage
    const MapSelector m = MapSelector::from({0.8, 0.3, -0.5, 0.6});
    const AmbientPose X = AmbientPose::embed(PoseMatrix::cylinder_pose(0.7, 0.4));
    const FiberGenerator gen = fiber(m, X);
    const auto basis = gen.basis();
    int best = 0;
    for (int l = 1; l < 6; ++l) {
        if (std::abs(basis.effective[static_cast<std::size_t>(l)][0]) >
            std::abs(basis.effective[static_cast<std::size_t>(best)][0])) {
            best = l;
        }
    }
    FiberOffsets on_base{};
    on_base[static_cast<std::size_t>(best)] = -X.x0() / basis.effective[static_cast<std::size_t>(best)][0];
    CHECK_THROWS_AS(mu(m, gen.at(on_base)), ZeroImage);

    // the rotational base set rejects fiber construction outright
    const MapSelector e1 = MapSelector::from({0, 1, 0, 0});
    CHECK_THROWS_AS(fiber(e1, AmbientPose::embed(PoseMatrix::identity())), ZeroImage);
}

TEST_CASE("essential scalars") {
    const MapSelector m = MapSelector::from({1, 1, 1, 1});
    CHECK(essential_scalar(m, FiberOffsets{}) == 0);
    FiberOffsets first{};
    first[0] = 1;
    CHECK(essential_scalar(m, first) == 0);  // n1 n2 vanishes at this selector

    // the bilinear form equals the psi-perturbation of the closed-form basis
    for (int trial = 0; trial < 20; ++trial) {
        const MapSelector ms = random_selector();
        const FiberGenerator gen = fiber(ms, AmbientPose::embed(PoseMatrix::identity()));
        FiberOffsets alpha;
        for (auto& v : alpha) v = uni(-1, 1);
        CHECK(std::abs(essential_scalar(ms, alpha) - gen.psi_perturbation(alpha)) <= 1e-12);
    }

    // equal essential scalars give projectively identical interpolants
    const MapSelector ms = MapSelector::from({0.9, -0.4, 0.35, 0.75});
    const auto pair = canonicalize_pair(PoseMatrix::identity(), PoseMatrix::cylinder_pose(1.2, 0.9));
    const auto basis = nullspace_basis(ms);
    const double targetA = 0.3, targetB = -0.2;
    FiberOffsets a1{}, a2{}, b1{}, b2{};
    a1[0] = targetA / basis.effective[0][0];
    a2[3] = targetA / basis.effective[3][0];
    b1[4] = targetB / basis.effective[4][0];
    b2[5] = targetB / basis.effective[5][0];
    const MotionCurve c1 = cubic_interpolant(pair, ms, a1, b1);
    const MotionCurve c2 = cubic_interpolant(pair, ms, a2, b2);
    CHECK(projectively_equal(c1.poly, c2.poly, 1e-10));
}

TEST_CASE("mu_poly applies the map exactly to ambient polynomials") {
    const MapSelector m = random_selector();
    const AmbientPose A = AmbientPose::embed(random_pose());
    const AmbientPose B = AmbientPose::embed(random_pose());
    const DualQuatPoly poly = mu_poly(m, {A, B - A});
    for (int i = 0; i <= 10; ++i) {
        const double t = i / 10.0;
        const AmbientPose at = (1 - t) * A + t * B;
        CHECK(projective_distance(poly.eval(t), mu(m, at)) <= 1e-12);
    }
}
