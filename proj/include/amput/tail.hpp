#pragma once

#include <complex>
#include <functional>

#include "amput/obstacle.hpp"

namespace amput {

using cplx = std::complex<double>;

/// Large-time model of the deviation beyond the last sample:
/// varphi(t) ~ (beta1 t^{-3/2} + c2 t^{-5/2} + c3 t^{-7/2}) e^{-t}.
struct TailModel {
    double T = 0.0;
    double varphi_T = 0.0;  ///< sampled deviation at T
    double beta1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;

    [[nodiscard]] double amplitude(double t) const;     ///< varphi e^t
    [[nodiscard]] double amplitude_dt(double t) const;
    [[nodiscard]] double varphi(double t) const;
    [[nodiscard]] double dvarphi(double t) const;
    /// integral over [T, inf) of |varphi'| e^t, by parts: varphi(T) e^T + int varphi e^t.
    [[nodiscard]] double flux_tail() const;
};

/// Least-squares fit of c2, c3 over [T - window, T] with beta1 held fixed.
[[nodiscard]] TailModel fit_tail(const BoundaryCurve& curve, double beta1, double window = 2.0);

/// Mean of e^{kappa t} over [t0, t1].
[[nodiscard]] cplx exp_step_average(cplx kappa, double t0, double t1);

/// Sum over steps of (phi_{i+1} - phi_i) f(varphi at the step midpoint) times the
/// mean of e^{kappa t} over the step: a Stieltjes sum for int |varphi'| f(varphi) e^{kappa t} dt.
template <class F>
[[nodiscard]] cplx stieltjes_sum(const BoundaryCurve& c, F&& f, cplx kappa) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const double dphi = c.phi[i + 1] - c.phi[i];
        if (dphi == 0.0) continue;
        const double vm = 0.5 * (c.varphi[i] + c.varphi[i + 1]);
        sum += dphi * cplx(f(vm)) * exp_step_average(kappa, c.t[i], c.t[i + 1]);
    }
    return sum;
}

/// Trapezoid rule for int_0^{t_max} f(t, varphi(t)) dt on the curve samples.
template <class F>
[[nodiscard]] cplx trapezoid(const BoundaryCurve& c, F&& f) {
    cplx sum = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        sum += 0.5 * (c.t[i + 1] - c.t[i]) * (cplx(f(c.t[i], c.varphi[i])) + cplx(f(c.t[i + 1], c.varphi[i + 1])));
    }
    return sum;
}

/// int_T^inf f(t) dt for a complex integrand decaying at infinity (double-exponential rule).
[[nodiscard]] cplx integrate_to_infinity(const std::function<cplx(double)>& f, double T);

/// int_a^b f(t) dt, adaptive Gauss-Kronrod on real and imaginary parts.
[[nodiscard]] cplx integrate_interval(const std::function<cplx(double)>& f, double a, double b);

}  // namespace amput
