#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "amput/canonical.hpp"
#include "amput/error.hpp"
#include "amput/lattice.hpp"

using namespace amput;

TEST(LatticePrice, ShortExpiryIsPayoff) {
    for (double s0 : {0.5, 0.9, 1.0, 1.3}) {
        const LatticeSpec spec{1, 1e-14, {0.05, 0.3}};
        EXPECT_NEAR(price_american_put(spec, s0), std::max(0.0, 1.0 - s0), 1e-6) << s0;
    }
}

TEST(LatticePrice, AmericanDominatesEuropeanAndPayoff) {
    for (const MarketParams m : {MarketParams{0.05, 0.3}, MarketParams{1.0, std::numbers::sqrt2}}) {
        const LatticeSpec spec{500, 1.5, m};
        for (double s0 : {0.6, 1.0, 1.4}) {
            const double am = price_american_put(spec, s0);
            EXPECT_GE(am, price_european_put(spec, s0) - 1e-14);
            EXPECT_GE(am, std::max(0.0, 1.0 - s0) - 1e-14);
        }
    }
}

TEST(LatticePrice, RejectsBadInputs) {
    EXPECT_THROW((void)price_american_put(LatticeSpec{0, 1.0, {0.05, 0.3}}, 1.0), Error);
    EXPECT_THROW((void)price_american_put(LatticeSpec{10, -1.0, {0.05, 0.3}}, 1.0), Error);
    EXPECT_THROW((void)price_american_put(LatticeSpec{10, 1.0, {0.05, 0.3}}, 0.0), Error);
}

TEST(LatticePrice, SuccessiveDifferencesShrink) {
    const MarketParams m{0.05, 0.3};
    double prev = price_american_put({500, 1.0, m}, 1.0);
    double last_diff = INFINITY;
    for (std::size_t n : {1000u, 2000u, 4000u}) {
        const double v = price_american_put({n, 1.0, m}, 1.0);
        const double d = std::abs(v - prev);
        EXPECT_LT(d, last_diff) << n;
        last_diff = d;
        prev = v;
    }
}

TEST(LatticeBoundary, ShapeInvariants) {
    const LatticeSpec spec{1000, 2.0, {0.05, 0.3}};
    const LatticeBoundary lb = extract_lattice_boundary(spec);
    ASSERT_EQ(lb.t.size(), lb.s_star.size());
    ASSERT_GT(lb.t.size(), 10u);
    EXPECT_EQ(lb.t.front(), 0.0);
    EXPECT_EQ(lb.s_star.front(), 1.0);
    for (std::size_t i = 0; i < lb.t.size(); ++i) {
        EXPECT_GT(lb.s_star[i], 0.0);
        EXPECT_LE(lb.s_star[i], 1.0);
        if (i > 0) EXPECT_LE(lb.s_star[i], lb.s_star[i - 1]);
    }
}

TEST(LatticeBoundary, MidpointRefinementAlsoMonotone) {
    const LatticeSpec spec{800, 1.0, {0.1, 0.4}};
    const LatticeBoundary lb = extract_lattice_boundary(spec, LatticeRefinement::midpoint);
    for (std::size_t i = 1; i < lb.t.size(); ++i) EXPECT_LE(lb.s_star[i], lb.s_star[i - 1]);
}

TEST(LatticeCanonical, ZeroRhoMapStartsAtOriginAndStaysBelowAsymptote) {
    const MarketParams m{1.0, std::numbers::sqrt2};
    const LatticeBoundary lb = extract_lattice_boundary({2000, 3.0, m});
    const BoundaryCurve c = lattice_boundary_to_canonical(lb, m);
    EXPECT_NEAR(c.phi.front(), 0.0, 1e-12);
    for (std::size_t i = 0; i < c.size(); ++i) EXPECT_LT(c.phi[i], std::numbers::ln2);
    // the first levels below the root are too narrow to reach the boundary
    EXPECT_GT(c.t.back(), 2.9);
    EXPECT_LE(c.t.back(), 3.0);
}

TEST(LatticeCanonical, RoundTripRecoversCriticalPrice) {
    const MarketParams m{0.07, 0.35};
    const LatticeBoundary lb = extract_lattice_boundary({600, 2.0, m});
    const BoundaryCurve c = lattice_boundary_to_canonical(lb, m);
    for (std::size_t i = 1; i < c.size(); i += 37) {
        EXPECT_NEAR(canonical_to_lattice_price(c.t[i], c.phi[i], m) / lb.s_star[i], 1.0, 1e-12);
    }
}
