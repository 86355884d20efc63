#pragma once

#include <utility>
#include <vector>

#include "motionforge/extmap.hpp"
#include "motionforge/motions.hpp"
#include "motionforge/posemodels.hpp"

namespace motionforge {

// Control points live in the ambient 13-coordinate space; a control "pose" is
// the embedded pose, optionally displaced inside its fiber.
struct ControlPolygon {
    std::vector<AmbientPose> points;

    void validate(double tol = kDefaultTolerance) const;  // throws InvalidInput
};

// Repeated linear interpolation; equals Bernstein-form evaluation.
AmbientPose de_casteljau(const ControlPolygon& cp, double t);

// Left and right subpolygons at t; concatenation reparameterizes the curve.
std::pair<ControlPolygon, ControlPolygon> bezier_subdivide(const ControlPolygon& cp, double t);

// The Bezier curve in ambient space pushed through the map of the selector,
// as an exact polynomial motion of degree 2(n-1). Throws ZeroImage if the
// rotational image vanishes somewhere on [0, 1].
MotionCurve bezier_motion(const ControlPolygon& cp, const MapSelector& m,
                          double tol = kDefaultTolerance);

}  // namespace motionforge
