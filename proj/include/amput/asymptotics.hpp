#pragma once

#include <functional>
#include <string>
#include <vector>

#include "amput/obstacle.hpp"
#include "amput/tail.hpp"

namespace amput {

struct AsymptoticReport {
    double mu = 0.0;
    double eta = 0.0;
    double moment_v1 = 0.0;
    double B1 = 0.0;
    double lambda0 = 0.0;
    double beta1 = 0.0;        ///< Gamma(3/2) lambda0
    double beta1_intro = 0.0;  ///< phi e^{rho phi} phi' e^t form
    double beta1_parts = 0.0;  ///< integrated by parts, no derivative of phi
    double tail_fit = 0.0;     ///< least-squares constant of varphi t^{3/2} e^t on the fit window
    double consistency = 0.0;  ///< |beta1 - beta1_parts|
};

/// Signed first moment int (x - mu) V_1(0, x) dx of the odd boundary data.
[[nodiscard]] double first_moment_v1(const CanonicalParams& p);

/// The same combination with the envelope term taken as -2 eta instead of -2 eta e^mu.
/// Kept only to document the discrepancy; it does not equal the moment.
[[nodiscard]] double first_moment_v1_uncorrected(const CanonicalParams& p);

/// e^{-rho mu} / (2 sqrt(pi) (1 - rho^2)) * (-first_moment_v1).
[[nodiscard]] double b1(const CanonicalParams& p);

/// (1 + w) e^{-w} - 1 divided by w^2, accurate for small w.
[[nodiscard]] double parts_kernel(double w);

enum class Lambda0Line { with_flux_identity, direct };
enum class Beta1Form { lambda0, intro, parts };

/// lambda0 from boundary increments. `direct` is (1/pi) int |varphi'| (mu - varphi) e^{-rho varphi} e^t dt
/// with the tail beyond t_max from the fitted model; `with_flux_identity` replaces the mu term by its
/// closed-form value and needs no tail.
[[nodiscard]] double lambda0(const BoundaryCurve& curve, Lambda0Line line = Lambda0Line::direct);

[[nodiscard]] double beta1(const BoundaryCurve& curve, Beta1Form form);

/// Tail model with beta1 taken from the parts form.
[[nodiscard]] TailModel curve_tail(const BoundaryCurve& curve);

struct TailLaw {
    double constant = 0.0;  ///< least-squares constant (the mean) of varphi t^{3/2} e^t
    double spread = 0.0;    ///< (max - min) / constant on the window
    double loglog_slope = 0.0;  ///< slope of log(varphi e^t) against log t
};

[[nodiscard]] TailLaw tail_law(const BoundaryCurve& curve, double t0 = 4.0, double t1 = 7.0);

struct HeatExtension {
    double value = 0.0;
    double leading_term = 0.0;
};

/// Gaussian-kernel extension of odd initial data f at (t, x), with its leading large-t term
/// x / (4 sqrt(pi) t^{3/2}) int f(xi) xi dxi. Throws invalid_params if f is not odd.
[[nodiscard]] HeatExtension heat_extension(const std::function<double(double)>& f, double t, double x);

/// int x u(t, x) dx for the extension of odd f; equals int xi f(xi) dxi for every t.
[[nodiscard]] double heat_extension_first_moment(const std::function<double(double)>& f, double t);

struct LambdaOptions {
    bool allow_beyond = false;  ///< permit 1.9 < x <= 2 where the tail converges slowly
};

[[nodiscard]] double lambda_density(const BoundaryCurve& curve, double x, LambdaOptions opt = {});

struct LambdaDensity {
    std::vector<double> x;
    std::vector<double> lam;
    double lambda0_limit = 0.0;
};

[[nodiscard]] LambdaDensity sample_lambda_density(const BoundaryCurve& curve, const std::vector<double>& xs);

/// Richardson limit of Lambda(1 + e) / sqrt(e) from e = 1e-3 and 4e-3.
[[nodiscard]] double lambda0_from_density(const BoundaryCurve& curve);

/// Laplace transform of Lambda (restricted to [1, 2]) at each t.
[[nodiscard]] std::vector<double> phi_lambda(const BoundaryCurve& curve, const std::vector<double>& t);

[[nodiscard]] double expansion_eval(double t, const std::vector<double>& lambdas);

/// (1 + rho) sqrt(2 t log(1/t)), 0 < t < 1/e.
[[nodiscard]] double small_time_reference(double t, double rho);

/// Upper incomplete gamma Gamma(-1/2, t) = 2 (e^{-t}/sqrt t - sqrt(pi) erfc(sqrt t)).
[[nodiscard]] double upper_gamma_minus_half(double t);

/// Second theta-derivative of the deviation at theta = 0.
[[nodiscard]] double d2varphi_dtheta2_at0(double t, double rho);

struct ThetaCheck {
    std::vector<double> t;
    std::vector<double> varphi_delta;
    std::vector<double> varphi_half;
    std::vector<double> onset_ratio;  ///< varphi(delta/2) / varphi(delta)
    std::vector<double> second_derivative_estimate;  ///< 2 varphi(delta) / delta^2
    std::vector<double> closed_form;
    std::vector<double> rel_err;
};

struct ThetaCheckOptions {
    double h = 5e-4;
    double dt = 1e-4;
    double t_max = 0.0;  ///< defaults to the largest requested time
};

/// Solves at theta = delta and delta/2 (concurrently) and compares with the closed form.
[[nodiscard]] ThetaCheck first_theta_derivative_check(double rho, double delta, const std::vector<double>& t,
                                                      ThetaCheckOptions opt = {});

[[nodiscard]] AsymptoticReport make_report(const BoundaryCurve& curve);

}  // namespace amput
