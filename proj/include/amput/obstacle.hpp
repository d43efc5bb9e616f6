#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "amput/canonical.hpp"

namespace amput {

enum class LcpMethod {
    policy_iteration,  ///< active-set (Howard) iteration with tridiagonal solves
    psor,              ///< projected successive over-relaxation
};

/// Uniform space-time grid. Space nodes are x_left + j*h, j = 0..nx-1, and one
/// of them sits exactly at x = 0.
struct GridSpec {
    double t_max = 1.0;
    std::size_t nt = 2;
    double x_left = -8.0;
    double x_right = 2.0;
    std::size_t nx = 3;
    double psor_tol = 1e-10;
    double psor_omega = 1.5;
    std::size_t psor_max_iter = 100000;
    LcpMethod method = LcpMethod::policy_iteration;
    /// U is stored every snapshot_every time steps (and at t_max).
    std::size_t snapshot_every = 100;

    [[nodiscard]] double h() const { return (x_right - x_left) / static_cast<double>(nx - 1); }
    [[nodiscard]] double dt() const { return t_max / static_cast<double>(nt); }
    [[nodiscard]] std::size_t zero_index() const;
    [[nodiscard]] double x(std::size_t j) const;

    /// Throws invalid_params unless x_left < 0 < mu < x_right and 0 is a node.
    void validate(double mu) const;

    /// Default truncation x_left = -max(8, 6 sqrt(t_max)), x_right = mu + 1,
    /// rounded outwards to multiples of h.
    [[nodiscard]] static GridSpec make(const CanonicalParams& p, double t_max, double h, double dt);
};

/// Values of W = e^{-t} U next to the front at one time level.
struct FrontRecord {
    double t = 0.0;
    std::ptrdiff_t last_active = -1;  ///< last node with W > 0, -1 if none
    std::size_t first = 0;            ///< node index of w[0]
    std::vector<double> w;            ///< W at nodes first .. last_active + 1
};

struct ObstacleSolution {
    GridSpec grid;
    CanonicalParams params;
    BoundaryConstants constants;
    std::vector<double> snapshot_t;
    std::vector<std::vector<double>> u;  ///< U(snapshot_t[i], x_j)
    std::vector<double> source_mass;     ///< theta (1+rho) e^t at each snapshot time
    std::vector<FrontRecord> fronts;     ///< one record per time step, t_0 = 0 included
    double max_complementarity = 0.0;    ///< max over nodes of |min(U, residual)| (W scale)
    double min_u = 0.0;
    std::size_t lcp_iterations = 0;

    [[nodiscard]] std::vector<double> x_nodes() const;
};

struct BoundaryCurve {
    std::vector<double> t;
    std::vector<double> phi;
    std::vector<double> varphi;
    std::vector<double> dphi;
    std::vector<double> phi_raw;  ///< before the monotone projection (may be empty)
    CanonicalParams params;
    double mu = 0.0;

    [[nodiscard]] std::size_t size() const { return t.size(); }
    /// Rebuilds varphi = mu - phi and the central-difference dphi.
    void finalize();
};

/// Linear interpolation of phi at time t (clamped to the sampled range).
[[nodiscard]] double boundary_at(const BoundaryCurve& curve, double t);

[[nodiscard]] ObstacleSolution solve(const CanonicalParams& p, const GridSpec& g);

/// Sub-grid boundary location at every time step. threshold is in units of U.
[[nodiscard]] BoundaryCurve extract_boundary(const ObstacleSolution& sol, double threshold = 0.0);

/// Pool-adjacent-violators projection onto nondecreasing sequences.
[[nodiscard]] std::vector<double> isotonic_nondecreasing(const std::vector<double>& y);

struct SmoothFitResidual {
    std::vector<double> t;
    std::vector<double> residual;  ///< one-sided estimate of d_x U at phi(t)
    [[nodiscard]] double mean_abs_scaled(double t0, double t1) const;  ///< average of |residual| e^{-t}
};

[[nodiscard]] SmoothFitResidual smooth_fit_residual(const ObstacleSolution& sol, const BoundaryCurve& curve);

/// U + V at (t, x) in the shifted canonical frame, bilinear in the stored snapshots.
[[nodiscard]] double envelope_value(const ObstacleSolution& sol, double t, double x);

/// V-hat_{r,sigma}(t, x) in Brownian coordinates, via the scaling and the shift.
[[nodiscard]] double envelope_value(const ObstacleSolution& sol, const MarketParams& m, double t, double x);

/// American put price in nominal money, time to expiry t, nominal spot s_nominal (strike 1).
[[nodiscard]] double american_put_price(const ObstacleSolution& sol, const MarketParams& m, double t,
                                        double s_nominal);

/// Reward of the strategy that stops at the first of the lines x = 0 and x = mu:
/// a lower bound for the envelope in the strip 0 < x < mu.
[[nodiscard]] double stop_on_lines_value(const CanonicalParams& p, double t, double x);

}  // namespace amput
