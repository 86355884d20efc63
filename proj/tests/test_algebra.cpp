#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "motionforge/algebra.hpp"
#include "motionforge/motions.hpp"

using namespace motionforge;

namespace {

const Quaternion I{0, 1, 0, 0};
const Quaternion J{0, 0, 1, 0};
const Quaternion K{0, 0, 0, 1};

std::mt19937_64 rng(12345);
double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

DualQuaternion random_dq(double box = 1.0) {
    return {{uni(-box, box), uni(-box, box), uni(-box, box), uni(-box, box)},
            {uni(-box, box), uni(-box, box), uni(-box, box), uni(-box, box)}};
}

DualQuaternion random_unit_study() {
    Quaternion p{uni(-1, 1), uni(-1, 1), uni(-1, 1), uni(-1, 1)};
    p = (1.0 / p.norm()) * p;
    const Vec3 t{uni(-2, 2), uni(-2, 2), uni(-2, 2)};
    // q = -t p / 2 keeps <p, q> = 0
    return {p, -0.5 * (Quaternion::from_vector(t) * p)};
}

// Independent oracle: the 8x8 real left-multiplication representation, built
// from a hand-written basis multiplication table (basis 1, i, j, k, e, ei, ej, ek).
struct BasisProduct {
    int index;
    double sign;
};

BasisProduct basis_mul(int a, int b) {
    // quaternion part: indices 0..3, table of (index, sign)
    static const int qi[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const double qs[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    const bool ea = a >= 4, eb = b >= 4;
    if (ea && eb) return {0, 0};  // eps^2 = 0
    const int qa = a % 4, qb = b % 4;
    const int idx = qi[qa][qb] + ((ea || eb) ? 4 : 0);
    return {idx, qs[qa][qb]};
}

std::array<std::array<double, 8>, 8> left_rep(const DualQuaternion& h) {
    const auto c = h.coords();
    std::array<std::array<double, 8>, 8> L{};
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            const auto p = basis_mul(a, b);
            L[static_cast<std::size_t>(p.index)][static_cast<std::size_t>(b)] +=
                c[static_cast<std::size_t>(a)] * p.sign;
        }
    }
    return L;
}

std::array<double, 8> mat_apply(const std::array<std::array<double, 8>, 8>& L, const std::array<double, 8>& v) {
    std::array<double, 8> out{};
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            out[static_cast<std::size_t>(i)] +=
                L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

double coord_dist(const std::array<double, 8>& a, const std::array<double, 8>& b) {
    double m = 0;
    for (int i = 0; i < 8; ++i) {
        m = std::max(m, std::abs(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]));
    }
    return m;
}

}  // namespace

TEST_CASE("quaternion defining relations") {
    CHECK(coord_dist((DualQuaternion{I} * DualQuaternion{J}).coords(), DualQuaternion{K}.coords()) == 0);
    CHECK((I * I).w == -1);
    CHECK((J * J).w == -1);
    CHECK((K * K).w == -1);
    CHECK(((I * J) * K).w == -1);
}

TEST_CASE("dual units square to zero") {
    const DualQuaternion a{Quaternion::identity(), I};
    const DualQuaternion b{Quaternion::identity(), J};
    const DualQuaternion prod = a * b;  // (1 + eps i)(1 + eps j) = 1 + eps(i + j)
    CHECK(prod.p.w == 1);
    CHECK(prod.q.x == 1);
    CHECK(prod.q.y == 1);
    CHECK(prod.q.w == 0);
    CHECK(prod.q.z == 0);
}

TEST_CASE("multiplication matches the 8x8 left-multiplication representation") {
    for (int trial = 0; trial < 50; ++trial) {
        const DualQuaternion h1 = random_dq(), h2 = random_dq(), h3 = random_dq();
        const auto L1 = left_rep(h1);
        CHECK(coord_dist((h1 * h2).coords(), mat_apply(L1, h2.coords())) <= 1e-12);
        // associativity through the matrix route
        const auto lhs = ((h1 * h2) * h3).coords();
        const auto rhs = mat_apply(L1, (h2 * h3).coords());
        CHECK(coord_dist(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("norm and conjugation") {
    const DualQuaternion onePlusI{{1, 1, 0, 0}, {}};
    const DualNumber n = dq_norm(onePlusI);
    CHECK(n.primal == 2);
    CHECK(n.dual == 0);

    for (int trial = 0; trial < 50; ++trial) {
        const DualQuaternion h1 = random_dq(), h2 = random_dq();
        const DualNumber lhs = dq_norm(h1 * h2);
        const DualNumber rhs = dq_norm(h1) * dq_norm(h2);
        CHECK(std::abs(lhs.primal - rhs.primal) <= 1e-12);
        CHECK(std::abs(lhs.dual - rhs.dual) <= 1e-12);

        // conj(p + eps q) = conj(p) + eps conj(q)
        CHECK(coord_dist(conj(h1).coords(), DualQuaternion{conj(h1.p), conj(h1.q)}.coords()) == 0);

        // conj(a b) = conj(b) conj(a)
        CHECK(coord_dist(conj(h1 * h2).coords(), (conj(h2) * conj(h1)).coords()) <= 1e-12);
    }
}

TEST_CASE("action on points") {
    const Vec3 pt{0.3, -0.7, 1.1};
    CHECK(norm(dq_act(DualQuaternion::identity(), pt) - pt) == 0);

    // unit translation along the third axis
    const DualQuaternion h{Quaternion::identity(), {0, 0, 0, -0.5}};
    const Vec3 img = dq_act(h, {0, 0, 0});
    CHECK(std::abs(img[0]) <= 1e-15);
    CHECK(std::abs(img[1]) <= 1e-15);
    CHECK(std::abs(img[2] - 1.0) <= 1e-15);

    // rotation about the third axis
    const double theta = 0.73;
    const DualQuaternion rot{{std::cos(theta / 2), 0, 0, std::sin(theta / 2)}, {}};
    const Vec3 on_circle = dq_act(rot, {1, 0, 0});
    CHECK(std::abs(on_circle[0] - std::cos(theta)) <= 1e-15);
    CHECK(std::abs(on_circle[1] - std::sin(theta)) <= 1e-15);
    CHECK(std::abs(on_circle[2]) <= 1e-15);

    CHECK_THROWS_AS(dq_act(DualQuaternion{{}, {1, 0, 0, 0}}, pt), ZeroPrimal);
}

TEST_CASE("rigidity and orientation for Study representatives") {
    for (int trial = 0; trial < 30; ++trial) {
        const DualQuaternion h = random_unit_study();
        const Vec3 a{uni(-1, 1), uni(-1, 1), uni(-1, 1)};
        const Vec3 b{uni(-1, 1), uni(-1, 1), uni(-1, 1)};
        const Vec3 c{uni(-1, 1), uni(-1, 1), uni(-1, 1)};
        const Vec3 fa = dq_act(h, a), fb = dq_act(h, b), fc = dq_act(h, c);
        CHECK(std::abs(norm(fa - fb) - norm(a - b)) <= 1e-10);
        CHECK(std::abs(norm(fb - fc) - norm(b - c)) <= 1e-10);
        CHECK(std::abs(norm(fa - fc) - norm(a - c)) <= 1e-10);
        // orientation: the induced linear map has determinant +1
        const Vec3 origin = dq_act(h, {0, 0, 0});
        const Vec3 e1 = dq_act(h, {1, 0, 0}) - origin;
        const Vec3 e2 = dq_act(h, {0, 1, 0}) - origin;
        const Vec3 e3 = dq_act(h, {0, 0, 1}) - origin;
        CHECK(std::abs(dot(e1, cross(e2, e3)) - 1.0) <= 1e-10);
    }
}

TEST_CASE("dq_normalize") {
    const DualQuaternion h = random_dq();
    const DualQuaternion n = dq_normalize(h);
    CHECK(std::abs(n.p.norm_sq() - 1.0) <= 1e-12);
    CHECK_THROWS_AS(dq_normalize(DualQuaternion{{}, {1, 2, 3, 4}}), ZeroPrimal);
}

TEST_CASE("polynomials with commuting indeterminate") {
    // (t - i)(t - j) = t^2 - (i + j) t + k
    const DualQuatPoly f({DualQuaternion{-I}, DualQuaternion::identity()});
    const DualQuatPoly g({DualQuaternion{-J}, DualQuaternion::identity()});
    const DualQuatPoly prod = poly_mul(f, g);
    REQUIRE(prod.size() == 3);
    CHECK(coord_dist(prod[0].coords(), DualQuaternion{K}.coords()) == 0);
    CHECK(coord_dist(prod[1].coords(), DualQuaternion{-(I + J)}.coords()) == 0);
    CHECK(coord_dist(prod[2].coords(), DualQuaternion::identity().coords()) == 0);

    for (int trial = 0; trial < 20; ++trial) {
        const DualQuatPoly a({random_dq(), random_dq(), random_dq()});
        const DualQuatPoly b({random_dq(), random_dq()});
        const double t0 = uni(-2, 2);
        CHECK(coord_dist(poly_eval(a * b, t0).coords(), (poly_eval(a, t0) * poly_eval(b, t0)).coords()) <=
              1e-12);
    }
}

TEST_CASE("polynomial ring laws") {
    for (int trial = 0; trial < 20; ++trial) {
        const DualQuatPoly a({random_dq(), random_dq()});
        const DualQuatPoly b({random_dq(), random_dq(), random_dq()});
        const DualQuatPoly c({random_dq(), random_dq()});
        const DualQuatPoly lhs = (a * b) * c;
        const DualQuatPoly rhs = a * (b * c);
        REQUIRE(lhs.size() == rhs.size());
        for (std::size_t i = 0; i < lhs.size(); ++i) {
            CHECK(coord_dist(lhs[i].coords(), rhs[i].coords()) <= 1e-12);
        }
        const DualQuatPoly dist_lhs = a * (b + c);
        const DualQuatPoly dist_rhs = a * b + a * c;
        for (std::size_t i = 0; i < dist_lhs.size(); ++i) {
            CHECK(coord_dist(dist_lhs[i].coords(), dist_rhs[i].coords()) <= 1e-12);
        }
    }
}

TEST_CASE("factorized product reproduces the paraboloid motion") {
    // 4(a i + b j) F1 F2 equals the line-symmetric motion of the paraboloid rulings
    for (const auto& [pa, pb] : {std::pair{1.0, 1.0}, {0.7, -1.3}, {2.0, 0.4}}) {
        const auto fac = factor_cubic(pa, pb);
        const DualQuatPoly product = fac.leading * (fac.F1 * fac.F2);
        const MotionCurve motion = line_symmetric_motion(ruling_family_paraboloid(pa, pb));
        CHECK(projectively_equal(product, motion.poly, 1e-12));
    }
}
