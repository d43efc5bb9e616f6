#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "amput/canonical.hpp"
#include "amput/error.hpp"
#include "amput/obstacle.hpp"
#include "curves.hpp"

using namespace amput;
using amput::testing::reference_run;
using amput::testing::solve_on;

namespace {

// max |a - b| over the times of the coarser curve a (b is a refinement of a).
double max_gap(const BoundaryCurve& a, const BoundaryCurve& b, double t0) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.t[i] < t0) continue;
        worst = std::max(worst, std::abs(a.phi[i] - boundary_at(b, a.t[i])));
    }
    return worst;
}

}  // namespace

TEST(Solve, ThetaZeroGivesZeroEnvelopeGapAndBoundary) {
    const auto run = solve_on(CanonicalParams{0.3, 0.0, {}}, 1.0, 1e-2, 2e-3);
    for (const auto& row : run.sol.u) {
        for (double v : row) EXPECT_EQ(v, 0.0);
    }
    for (double v : run.curve.phi) EXPECT_EQ(v, 0.0);
}

TEST(Solve, InitialGapIsZero) {
    for (double rho : {-0.4, 0.0, 0.5}) {
        const auto run = solve_on(CanonicalParams{rho, 1.0, {}}, 0.5, 1e-2, 2e-3);
        ASSERT_FALSE(run.sol.u.empty());
        EXPECT_EQ(run.sol.snapshot_t.front(), 0.0);
        for (double v : run.sol.u.front()) EXPECT_EQ(v, 0.0);
    }
}

TEST(Solve, RejectsGridWithoutRoomPastMu) {
    CanonicalParams p{};
    GridSpec g = GridSpec::make(p, 1.0, 1e-2, 1e-2);
    g.x_right = 0.5;
    g.nx = static_cast<std::size_t>(std::llround((g.x_right - g.x_left) / 1e-2)) + 1;
    try {
        (void)solve(p, g);
        FAIL() << "expected invalid_params";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_params);
    }
}

TEST(Solve, PsorMatchesPolicyIteration) {
    const CanonicalParams p{0.2, 1.0, {}};
    GridSpec g = GridSpec::make(p, 0.5, 1e-2, 2e-3);
    const BoundaryCurve a = extract_boundary(solve(p, g));
    g.method = LcpMethod::psor;
    const ObstacleSolution s = solve(p, g);
    const BoundaryCurve b = extract_boundary(s);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.phi[i], b.phi[i], 1e-6);
    EXPECT_LE(s.max_complementarity, 1e-8);
}

TEST(Solve, PsorReportsNonConvergence) {
    const CanonicalParams p{};
    GridSpec g = GridSpec::make(p, 0.2, 1e-2, 2e-3);
    g.method = LcpMethod::psor;
    g.psor_max_iter = 2;
    try {
        (void)solve(p, g);
        FAIL() << "expected no_convergence";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::no_convergence);
    }
}

TEST(ReferenceRun, Complementarity) {
    const auto& run = reference_run();
    EXPECT_LE(run.sol.max_complementarity, 1e-10);
    EXPECT_GE(run.sol.min_u, -1e-10);
}

TEST(ReferenceRun, GapVanishesPastMu) {
    const auto& run = reference_run();
    const auto x = run.sol.x_nodes();
    const double band = run.sol.constants.mu + 2.0 * run.sol.grid.h();
    for (const auto& row : run.sol.u) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] >= band) EXPECT_EQ(row[j], 0.0);
        }
    }
}

TEST(ReferenceRun, BoundaryShape) {
    const auto& c = reference_run().curve;
    ASSERT_GT(c.size(), 100u);
    EXPECT_EQ(c.phi.front(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_GE(c.phi[i], 0.0);
        EXPECT_LT(c.phi[i], c.mu);
        EXPECT_EQ(c.varphi[i], c.mu - c.phi[i]);
        if (i > 0) EXPECT_GE(c.phi[i], c.phi[i - 1]);
    }
    EXPECT_NEAR(c.phi.back(), std::numbers::ln2, 5e-3);
}

TEST(ReferenceRun, RawMonotonicityViolationsWithinOneCell) {
    const auto& run = reference_run();
    const auto& raw = run.curve.phi_raw;
    ASSERT_EQ(raw.size(), run.curve.size());
    double worst = 0.0;
    for (std::size_t i = 1; i < raw.size(); ++i) worst = std::max(worst, raw[i - 1] - raw[i]);
    EXPECT_LE(worst, run.sol.grid.h());
}

TEST(ReferenceRun, ConcaveUpToGridNoise) {
    const auto& c = reference_run().curve;
    const double step = 0.1;
    for (double t = 0.2; t <= 7.8; t += step) {
        const double d2 = boundary_at(c, t + step) - 2.0 * boundary_at(c, t) + boundary_at(c, t - step);
        EXPECT_LE(d2, 2e-5) << t;
    }
}

TEST(ReferenceRun, SlopeBoundedAwayFromZeroInside) {
    const auto& run = reference_run();
    const auto& g = run.sol.grid;
    for (std::size_t k = 1; k < run.sol.snapshot_t.size(); k += 20) {
        const double t = run.sol.snapshot_t[k];
        const double x = boundary_at(run.curve, t) - 0.2;
        if (x <= g.h()) continue;
        const auto j = static_cast<std::size_t>(std::floor((x - g.x_left) / g.h()));
        const double ux = (run.sol.u[k][j + 1] - run.sol.u[k][j]) / g.h();
        EXPECT_LT(ux, 0.0) << t;
        EXPECT_GT(std::abs(ux), 1e-3 * std::exp(t) * 0.2) << t;
    }
}

TEST(Envelope, EqualsRewardInStoppingRegionAndDominatesIt) {
    const auto& run = reference_run();
    const CanonicalParams& p = run.sol.params;
    for (double t : {0.5, 1.0, 3.0, 7.0}) {
        for (double x : {0.7, 0.9, 1.2}) {
            EXPECT_NEAR(envelope_value(run.sol, t, x), reward_canonical(t, x, p), 1e-12 * std::exp(t + x));
        }
        for (double x = -3.0; x < 1.5; x += 0.173) {
            EXPECT_GE(envelope_value(run.sol, t, x), reward_canonical(t, x, p) - 1e-12);
        }
    }
}

TEST(Envelope, DominatesStopOnLinesStrategy) {
    const auto& run = reference_run();
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
        for (double x : {-1.0, -0.3, 0.1, 0.4, 0.65}) {
            const double vhat = envelope_value(run.sol, t, x);
            const double lower = stop_on_lines_value(run.sol.params, t, x);
            EXPECT_GE(vhat, lower - 1e-3 * std::exp(t)) << t << " " << x;
        }
    }
}

TEST(Envelope, OutsideGridIsOutOfDomain) {
    const auto& run = reference_run();
    try {
        (void)envelope_value(run.sol, 9.0, 0.1);
        FAIL() << "expected out_of_domain";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::out_of_domain);
    }
}

TEST(Envelope, ZeroRhoPriceAtUnitSpotEqualsGapAtOrigin) {
    const auto& run = reference_run();
    const MarketParams m{1.0, std::numbers::sqrt2};
    for (double t : {0.5, 2.0}) {
        EXPECT_NEAR(american_put_price(run.sol, m, t, 1.0), std::exp(-t) * envelope_value(run.sol, t, 0.0), 1e-12);
    }
}

TEST(GridConvergence, ThreeLevelRatio) {
    const CanonicalParams p{};
    const auto a = solve_on(p, 2.0, 2e-2, 4e-3).curve;
    const auto b = solve_on(p, 2.0, 1e-2, 2e-3).curve;
    const auto c = solve_on(p, 2.0, 5e-3, 1e-3).curve;
    const double d1 = max_gap(a, b, 0.2);
    const double d2 = max_gap(b, c, 0.2);
    EXPECT_GE(d2 / d1, 0.3) << d1 << " " << d2;
    EXPECT_LE(d2 / d1, 0.7) << d1 << " " << d2;
}

TEST(SmoothFit, ThetaZeroResidualsVanish) {
    const auto run = solve_on(CanonicalParams{0.0, 0.0, {}}, 0.5, 1e-2, 2e-3);
    const auto r = smooth_fit_residual(run.sol, run.curve);
    for (double v : r.residual) EXPECT_EQ(v, 0.0);
}

TEST(SmoothFit, ResidualShrinksUnderRefinement) {
    const CanonicalParams p{};
    const auto a = solve_on(p, 2.0, 2e-2, 4e-3);
    const auto b = solve_on(p, 2.0, 1e-2, 2e-3);
    const double ra = smooth_fit_residual(a.sol, a.curve).mean_abs_scaled(0.5, 2.0);
    const double rb = smooth_fit_residual(b.sol, b.curve).mean_abs_scaled(0.5, 2.0);
    EXPECT_GT(ra, 0.0);
    EXPECT_LE(rb, 0.6 * ra) << ra << " " << rb;
}

TEST(Isotonic, PoolsViolators) {
    const auto y = isotonic_nondecreasing({1.0, 3.0, 2.0, 2.0, 5.0, 4.0});
    const std::vector<double> want{1.0, 7.0 / 3.0, 7.0 / 3.0, 7.0 / 3.0, 4.5, 4.5};
    ASSERT_EQ(y.size(), want.size());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], want[i], 1e-15);
}
