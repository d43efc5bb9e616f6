#include "amput/tail.hpp"

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace amput {

double TailModel::amplitude(double t) const {
    return beta1 * std::pow(t, -1.5) + c2 * std::pow(t, -2.5) + c3 * std::pow(t, -3.5);
}

double TailModel::amplitude_dt(double t) const {
    return -1.5 * beta1 * std::pow(t, -2.5) - 2.5 * c2 * std::pow(t, -3.5) - 3.5 * c3 * std::pow(t, -4.5);
}

double TailModel::varphi(double t) const {
    return amplitude(t) * std::exp(-t);
}

double TailModel::dvarphi(double t) const {
    return (amplitude_dt(t) - amplitude(t)) * std::exp(-t);
}

double TailModel::flux_tail() const {
    if (!(T > 0.0)) return 0.0;
    return varphi_T * std::exp(T) + 2.0 * beta1 / std::sqrt(T) + (2.0 / 3.0) * c2 * std::pow(T, -1.5) +
           0.4 * c3 * std::pow(T, -2.5);
}

TailModel fit_tail(const BoundaryCurve& curve, double beta1, double window) {
    TailModel m;
    if (curve.size() < 2) return m;
    m.T = curve.t.back();
    m.varphi_T = curve.varphi.back();
    m.beta1 = beta1;
    // Normal equations for y = c2 t^{-5/2} + c3 t^{-7/2}, y = varphi e^t - beta1 t^{-3/2}.
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    const double t0 = std::max(m.T - window, 0.5 * m.T);
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double t = curve.t[i];
        if (t < t0) continue;
        const double y = curve.varphi[i] * std::exp(t) - beta1 * std::pow(t, -1.5);
        const double f1 = std::pow(t, -2.5);
        const double f2 = std::pow(t, -3.5);
        a11 += f1 * f1;
        a12 += f1 * f2;
        a22 += f2 * f2;
        b1 += f1 * y;
        b2 += f2 * y;
    }
    const double det = a11 * a22 - a12 * a12;
    if (det > 0.0 && std::isfinite(det)) {
        m.c2 = (b1 * a22 - b2 * a12) / det;
        m.c3 = (a11 * b2 - a12 * b1) / det;
    }
    return m;
}

cplx exp_step_average(cplx kappa, double t0, double t1) {
    const double dt = t1 - t0;
    const cplx w = kappa * dt;
    // (e^{kappa t1} - e^{kappa t0}) / (kappa dt) = e^{kappa t0} (e^w - 1) / w
    cplx ratio;
    if (std::abs(w) < 1e-4) {
        ratio = 1.0 + w / 2.0 + w * w / 6.0 + w * w * w / 24.0;
    } else {
        ratio = (std::exp(w) - 1.0) / w;
    }
    return std::exp(kappa * t0) * ratio;
}

cplx integrate_to_infinity(const std::function<cplx(double)>& f, double T) {
    boost::math::quadrature::exp_sinh<double> integrator;
    const double tol = 1e-10;
    const double re = integrator.integrate([&](double u) { return f(T + u).real(); }, tol);
    const double im = integrator.integrate([&](double u) { return f(T + u).imag(); }, tol);
    return {re, im};
}

cplx integrate_interval(const std::function<cplx(double)>& f, double a, double b) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    const double re = GK::integrate([&](double t) { return f(t).real(); }, a, b, 20, 1e-12);
    const double im = GK::integrate([&](double t) { return f(t).imag(); }, a, b, 20, 1e-12);
    return {re, im};
}

}  // namespace amput
