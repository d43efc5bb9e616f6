#include "curves.hpp"

namespace amput::testing {

Solved solve_on(const CanonicalParams& p, double t_max, double h, double dt) {
    Solved s{solve(p, GridSpec::make(p, t_max, h, dt)), {}};
    s.curve = extract_boundary(s.sol);
    return s;
}

const Solved& reference_run() {
    static const Solved run = solve_on(CanonicalParams{}, 8.0, 2.5e-3, 5e-4);
    return run;
}

}  // namespace amput::testing
