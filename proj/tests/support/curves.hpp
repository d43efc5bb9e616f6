#pragma once

#include "amput/obstacle.hpp"

namespace amput::testing {

struct Solved {
    ObstacleSolution sol;
    BoundaryCurve curve;
};

/// Solve and extract on the default grid for p.
[[nodiscard]] Solved solve_on(const CanonicalParams& p, double t_max, double h, double dt);

/// rho = 0, theta = 1, h = 2.5e-3, dt = 5e-4, t_max = 8; computed once per process.
[[nodiscard]] const Solved& reference_run();

}  // namespace amput::testing
