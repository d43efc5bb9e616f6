#pragma once

#include <optional>
#include <span>
#include <vector>

namespace amput {

/// Raw financial inputs. Money is measured in its value at expiry and the
/// nominal strike is 1.
struct MarketParams {
    double r = 0.0;      ///< continuously compounded interest rate (> 0)
    double sigma = 0.0;  ///< volatility per sqrt unit time (> 0)

    void validate() const;
};

/// Reduced parameters of the heat-equation frame.
struct CanonicalParams {
    double rho = 0.0;    ///< in (-1, 1)
    double theta = 1.0;  ///< line-mass scale, >= 0 (theta = 1 is the put)
    std::optional<double> alpha;  ///< space scale when derived from MarketParams

    void validate() const;
};

struct BoundaryConstants {
    double mu = 0.0;   ///< asymptote of the free boundary
    double eta = 0.0;  ///< coefficient of the large-time envelope eta * e^{t+x}
};

struct CanonicalPoint {
    double t = 0.0;
    double x = 0.0;
};

/// alpha = (sigma^2 + 2r) / (2 sqrt(2) sigma), rho = (sigma^2 - 2r) / (sigma^2 + 2r), theta = 1.
[[nodiscard]] CanonicalParams from_market(const MarketParams& m);

/// Put payoff max(0, e^{rt} - s) with s the stock price in expiry money.
[[nodiscard]] double reward_original(double t, double s, double r);

/// Maps (time to expiry, stock price in expiry money) to the scaled V_rho frame:
/// x = (sigma/sqrt2) t - (sqrt2/sigma) log s, then (alpha^2 t, alpha x).
[[nodiscard]] CanonicalPoint to_canonical_point(double t, double s, const MarketParams& m);

/// Inverse of to_canonical_point: returns (t, s).
[[nodiscard]] CanonicalPoint from_canonical_point(CanonicalPoint p, const MarketParams& m);

/// Payoff in Brownian coordinates, max(0, e^{rt} - e^{sigma^2 t/2 - sigma x/sqrt2}).
[[nodiscard]] double reward_market(double t, double x, const MarketParams& m);

/// Payoff V_rho before the affine shift (r = 1 - rho^2, sigma = sqrt2 (1 + rho)).
[[nodiscard]] double reward_rho(double t, double x, double rho);

/// V_{rho,theta}: the exponential combination on the open quadrant {t > 0, x > 0}
/// (and on t = 0, x > 0), zero elsewhere. No positive part is taken.
[[nodiscard]] double reward_canonical(double t, double x, const CanonicalParams& p);

/// x-derivative of the quadrant formula (zero outside the quadrant).
[[nodiscard]] double reward_canonical_dx(double t, double x, const CanonicalParams& p);

[[nodiscard]] double mu(const CanonicalParams& p);
[[nodiscard]] double eta(const CanonicalParams& p);
[[nodiscard]] BoundaryConstants boundary_constants(const CanonicalParams& p);

/// Boundary points of the shifted frame mapped back to the V_rho frame: x + 2 rho t.
[[nodiscard]] std::vector<double> unshift_boundary(std::span<const double> t,
                                                   std::span<const double> x_shifted,
                                                   double rho);
[[nodiscard]] std::vector<double> shift_boundary(std::span<const double> t,
                                                 std::span<const double> x_preshift,
                                                 double rho);

}  // namespace amput
