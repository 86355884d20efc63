#include "motionforge/bezier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "motionforge/realpoly.hpp"

namespace motionforge {

void ControlPolygon::validate(double tol) const {
    if (points.size() < 2) {
        throw InvalidInput("control polygon needs at least two points");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (std::abs(points[i].x0()) <= tol) {
            throw InvalidInput("control point " + std::to_string(i) + " has x0 = 0");
        }
    }
}

AmbientPose de_casteljau(const ControlPolygon& cp, double t) {
    cp.validate();
    std::vector<AmbientPose> level = cp.points;
    while (level.size() > 1) {
        for (std::size_t i = 0; i + 1 < level.size(); ++i) {
            level[i] = (1 - t) * level[i] + t * level[i + 1];
        }
        level.pop_back();
    }
    return level.front();
}

std::pair<ControlPolygon, ControlPolygon> bezier_subdivide(const ControlPolygon& cp, double t) {
    cp.validate();
    std::vector<AmbientPose> level = cp.points;
    ControlPolygon left, right;
    left.points.reserve(level.size());
    right.points.resize(level.size());
    left.points.push_back(level.front());
    right.points.back() = level.back();
    std::size_t r = level.size() - 1;
    while (level.size() > 1) {
        for (std::size_t i = 0; i + 1 < level.size(); ++i) {
            level[i] = (1 - t) * level[i] + t * level[i + 1];
        }
        level.pop_back();
        left.points.push_back(level.front());
        right.points[--r] = level.back();
    }
    return {left, right};
}

namespace {

double binom(int n, int k) {
    double v = 1;
    for (int i = 1; i <= k; ++i) v = v * static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

// Bernstein control points -> monomial coefficients in the 13 coordinates.
std::vector<AmbientPose> monomial_coefficients(const std::vector<AmbientPose>& cps) {
    const int n = static_cast<int>(cps.size()) - 1;
    std::vector<AmbientPose> out(cps.size());
    for (int k = 0; k <= n; ++k) {
        AmbientPose acc;
        for (int i = 0; i <= k; ++i) {
            const double sign = ((k - i) % 2 == 0) ? 1.0 : -1.0;
            acc = acc + (sign * binom(n, i) * binom(n - i, k - i)) * cps[static_cast<std::size_t>(i)];
        }
        out[static_cast<std::size_t>(k)] = acc;
    }
    return out;
}

}  // namespace

MotionCurve bezier_motion(const ControlPolygon& cp, const MapSelector& m, double tol) {
    cp.validate();
    const auto coeffs = monomial_coefficients(cp.points);
    DualQuatPoly poly = mu_poly(m, coeffs);

    // Scan the primal part for zeros on [0, 1]: candidates are the endpoints
    // and the stationary points of its squared norm.
    std::vector<RealPoly> primal(4);
    {
        std::array<std::vector<double>, 4> comp;
        for (auto& v : comp) v.resize(poly.size(), 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            comp[0][i] = poly[i].p.w;
            comp[1][i] = poly[i].p.x;
            comp[2][i] = poly[i].p.y;
            comp[3][i] = poly[i].p.z;
        }
        for (int k = 0; k < 4; ++k) primal[static_cast<std::size_t>(k)] = RealPoly(comp[static_cast<std::size_t>(k)]);
    }
    RealPoly norm_sq;
    for (const auto& p : primal) norm_sq = norm_sq + p * p;

    double scale = 0;
    for (const auto& p : primal) scale = std::max(scale, p.max_abs_coeff());
    std::vector<double> candidates = {0.0, 1.0};
    for (double r : real_roots_in(norm_sq.derivative(), 0.0, 1.0, 1e-7)) candidates.push_back(r);
    for (double t : candidates) {
        const double v = norm_sq.eval(t);
        if (v <= tol * tol * std::max(1.0, scale * scale)) {
            throw ZeroImage("bezier_motion: rotational image vanishes at t = " + std::to_string(t));
        }
    }

    MotionCurve out;
    out.kind = MotionKind::cubic;  // mu-image of an ambient curve; degree 2(n-1)
    out.poly = std::move(poly);
    return out;
}

}  // namespace motionforge
