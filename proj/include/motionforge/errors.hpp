#pragma once

#include <stdexcept>
#include <string>

namespace motionforge {

// Base class for all math-domain errors. `kind()` is stable and machine
// readable (used by the CLI error JSON); `what()` carries detail.
class KinematicsError : public std::runtime_error {
public:
    KinematicsError(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MOTIONFORGE_ERROR(Name)                                   \
    class Name : public KinematicsError {                         \
    public:                                                       \
        explicit Name(const std::string& msg)                     \
            : KinematicsError(#Name, msg) {}                      \
    }

MOTIONFORGE_ERROR(ZeroPrimal);            // dual quaternion on the exceptional generator
MOTIONFORGE_ERROR(StudyViolation);        // Study condition residual above tolerance
MOTIONFORGE_ERROR(AllZero);               // all four ratio tuples vanish
MOTIONFORGE_ERROR(InvalidPose);           // linear part not special orthogonal
MOTIONFORGE_ERROR(UndefinedMap);          // map selector m = 0
MOTIONFORGE_ERROR(ZeroImage);             // ambient point in the base set of the map
MOTIONFORGE_ERROR(PrimalVanishes);        // interpolant primal has a root in the domain
MOTIONFORGE_ERROR(PoleInDomain);          // cubic denominator g1 has a root in [0,1]
MOTIONFORGE_ERROR(NotInCylinderGroup);    // sampled poses leave the cylinder group
MOTIONFORGE_ERROR(ThirdPoseNotInCylinder);
MOTIONFORGE_ERROR(PitchPairInfeasible);
MOTIONFORGE_ERROR(NoSolution);
MOTIONFORGE_ERROR(InvalidSpec);           // bad surface/curve parameters
MOTIONFORGE_ERROR(NonAlgebraicMotion);    // sampled motion fed to an algebraic operation
MOTIONFORGE_ERROR(InvalidInput);          // CLI-level input validation

#undef MOTIONFORGE_ERROR

}  // namespace motionforge
