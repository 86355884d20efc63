#pragma once

#include <string>
#include <vector>

#include "motionforge/algebra.hpp"

namespace motionforge::checks {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // deterministic summary (worst residuals, counts)
};

// The ten verification suites behind `motionforge check`. Each runs a fixed
// deterministic workload; `tol` is the zero-test tolerance (the per-suite
// thresholds themselves are fixed).
CriterionResult run_criterion(int id, double tol = kDefaultTolerance);
std::vector<CriterionResult> run_all(double tol = kDefaultTolerance);

}  // namespace motionforge::checks
