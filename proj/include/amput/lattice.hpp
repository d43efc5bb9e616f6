#pragma once

#include <cstddef>
#include <vector>

#include "amput/canonical.hpp"
#include "amput/obstacle.hpp"

namespace amput {

/// Cox-Ross-Rubinstein tree for a put with nominal strike 1.
struct LatticeSpec {
    std::size_t steps = 1000;
    double T = 1.0;
    MarketParams market;

    void validate() const;
};

enum class LatticeRefinement {
    sqrt_fit,   ///< root of the square root of the continuation premium, two nodes
    midpoint,   ///< geometric midpoint of the bracketing nodes
};

struct LatticeBoundary {
    std::vector<double> t;       ///< time to expiry
    std::vector<double> s_star;  ///< critical nominal price: exercise iff S <= s_star
    double price_at_root = 0.0;  ///< value at S0 = 1
};

[[nodiscard]] double price_american_put(const LatticeSpec& spec, double s0);
[[nodiscard]] double price_european_put(const LatticeSpec& spec, double s0);

[[nodiscard]] LatticeBoundary extract_lattice_boundary(const LatticeSpec& spec,
                                                       LatticeRefinement refine = LatticeRefinement::sqrt_fit);

/// Boundary in the shifted canonical frame; theta = 1 and the time axis is alpha^2 t.
[[nodiscard]] BoundaryCurve lattice_boundary_to_canonical(const LatticeBoundary& lb, const MarketParams& m);

/// Inverse of the canonical mapping for a single boundary point: returns s_star.
[[nodiscard]] double canonical_to_lattice_price(double t_canonical, double x_shifted, const MarketParams& m);

}  // namespace amput
