#include "amput/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "amput/error.hpp"

namespace amput {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kGamma32 = 0.5 * kSqrtPi;

// (e^w - 1 - w) / w^2
double expm1_minus_w_over_w2(double w) {
    if (std::abs(w) < 1e-4) {
        return 0.5 + w / 6.0 + w * w / 24.0;
    }
    return (std::expm1(w) - w) / (w * w);
}

// Linear interpolation of the deviation; zero past the curve.
double varphi_at(const BoundaryCurve& c, double t) {
    if (c.size() == 0) return 0.0;
    if (t <= c.t.front()) return c.varphi.front();
    if (t >= c.t.back()) return c.varphi.back();
    const auto it = std::upper_bound(c.t.begin(), c.t.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - c.t.begin());
    const double w = (t - c.t[k - 1]) / (c.t[k] - c.t[k - 1]);
    return (1.0 - w) * c.varphi[k - 1] + w * c.varphi[k];
}

}  // namespace

double first_moment_v1(const CanonicalParams& p) {
    const BoundaryConstants bc = boundary_constants(p);
    const double m = bc.mu;
    const double r = p.rho;
    return -2.0 * bc.eta * std::exp(m) + 2.0 * m * m * expm1_minus_w_over_w2(r * m) -
           (1.0 - r) * std::exp((r + 1.0) * m) * (std::exp(-m) - 1.0 + m) -
           (1.0 - p.theta) * (1.0 + r) * (std::expm1(m) - m);
}

double first_moment_v1_uncorrected(const CanonicalParams& p) {
    const BoundaryConstants bc = boundary_constants(p);
    return first_moment_v1(p) + 2.0 * bc.eta * std::exp(bc.mu) - 2.0 * bc.eta;
}

double b1(const CanonicalParams& p) {
    const double m = mu(p);
    return std::exp(-p.rho * m) / (2.0 * kSqrtPi * (1.0 - p.rho * p.rho)) * (-first_moment_v1(p));
}

double parts_kernel(double w) {
    if (std::abs(w) < 0.1) {
        // sum_{k>=2} (-1)^k (1 - k) w^{k-2} / k!
        double sum = 0.0;
        double term = 1.0;  // w^{k-2} / k! at k = 2 is 1/2
        double fact = 2.0;
        for (int k = 2; k <= 14; ++k) {
            if (k > 2) {
                term *= w;
                fact *= k;
            }
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            sum += sign * (1.0 - k) * term / fact;
        }
        return sum;
    }
    return ((1.0 + w) * std::exp(-w) - 1.0) / (w * w);
}

namespace {

double beta1_parts_impl(const BoundaryCurve& c) {
    const CanonicalParams& p = c.params;
    const double m = c.mu;
    const double r = p.rho;
    if (p.theta == 0.0) return 0.0;
    auto integrand = [&](double t, double v) { return v * v * parts_kernel(r * v) * std::exp(t); };
    double integral = trapezoid(c, integrand).real();
    if (c.size() > 1) {
        // Beyond t_max the integrand decays like t^{-3} e^{-t}.
        const double T = c.t.back();
        integral += integrand(T, c.varphi.back()) / (1.0 + 3.0 / T);
    }
    const double bracket = p.theta * m * std::exp(-r * m) / (1.0 - r) + m * m * parts_kernel(r * m) + integral;
    return bracket / (2.0 * kSqrtPi);
}

}  // namespace

TailModel curve_tail(const BoundaryCurve& curve) {
    return fit_tail(curve, beta1_parts_impl(curve));
}

double lambda0(const BoundaryCurve& c, Lambda0Line line) {
    const CanonicalParams& p = c.params;
    const double m = c.mu;
    const double r = p.rho;
    if (p.theta == 0.0) return 0.0;
    if (line == Lambda0Line::with_flux_identity) {
        const cplx s = stieltjes_sum(c, [&](double v) { return v * std::exp(-r * v); }, 1.0);
        return (p.theta * m * std::exp(-m * r) / (1.0 - r) - s.real()) / std::numbers::pi;
    }
    const cplx s = stieltjes_sum(c, [&](double v) { return (m - v) * std::exp(-r * v); }, 1.0);
    const TailModel tail = curve_tail(c);
    return (s.real() + m * tail.flux_tail()) / std::numbers::pi;
}

double beta1(const BoundaryCurve& c, Beta1Form form) {
    switch (form) {
        case Beta1Form::lambda0:
            return kGamma32 * lambda0(c, Lambda0Line::direct);
        case Beta1Form::parts:
            return beta1_parts_impl(c);
        case Beta1Form::intro: {
            const CanonicalParams& p = c.params;
            if (p.theta == 0.0) return 0.0;
            const double r = p.rho;
            const double m = c.mu;
            // Exact antiderivative of phi e^{rho phi} across each step.
            auto anti = [&](double ph) {
                const double w = r * ph;
                if (std::abs(w) < 0.5) {
                    // sum_k r^k phi^{k+2} / (k! (k + 2))
                    double sum = 0.0, term = 1.0;
                    for (int k = 0; k < 30; ++k) {
                        if (k > 0) term *= w / k;
                        sum += term / (k + 2);
                    }
                    return ph * ph * sum;
                }
                return (ph / r - 1.0 / (r * r)) * std::exp(w) + 1.0 / (r * r);
            };
            double sum = 0.0;
            for (std::size_t i = 0; i + 1 < c.size(); ++i) {
                const double d = anti(c.phi[i + 1]) - anti(c.phi[i]);
                if (d == 0.0) continue;
                sum += d * exp_step_average(1.0, c.t[i], c.t[i + 1]).real();
            }
            const TailModel tail = curve_tail(c);
            sum += m * std::exp(r * m) * tail.flux_tail();
            return std::exp(-r * m) / (2.0 * kSqrtPi) * sum;
        }
    }
    return 0.0;
}

TailLaw tail_law(const BoundaryCurve& c, double t0, double t1) {
    TailLaw law;
    double sy = 0.0, lo = INFINITY, hi = -INFINITY;
    double sx = 0.0, sl = 0.0, sxx = 0.0, sxl = 0.0;
    std::size_t n = 0, nl = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double t = c.t[i];
        if (t < t0 || t > t1) continue;
        const double y = c.varphi[i] * std::pow(t, 1.5) * std::exp(t);
        sy += y;
        lo = std::min(lo, y);
        hi = std::max(hi, y);
        ++n;
        if (c.varphi[i] > 0.0) {
            const double lx = std::log(t);
            const double ly = std::log(c.varphi[i]) + t;
            sx += lx;
            sl += ly;
            sxx += lx * lx;
            sxl += lx * ly;
            ++nl;
        }
    }
    if (n == 0) return law;
    law.constant = sy / static_cast<double>(n);
    law.spread = law.constant != 0.0 ? (hi - lo) / law.constant : 0.0;
    if (nl >= 2) {
        const double dn = static_cast<double>(nl);
        law.loglog_slope = (dn * sxl - sx * sl) / (dn * sxx - sx * sx);
    }
    return law;
}

namespace {

void require_odd(const std::function<double(double)>& f) {
    for (int k = 1; k <= 200; ++k) {
        const double xi = 0.1 * k;
        const double a = f(xi);
        const double b = f(-xi);
        if (std::abs(a + b) > 1e-10 * std::max(1.0, std::abs(a))) {
            throw Error(ErrorKind::invalid_params, "initial data is not odd");
        }
    }
}

double odd_first_moment(const std::function<double(double)>& f) {
    boost::math::quadrature::exp_sinh<double> es;
    return 2.0 * es.integrate([&](double xi) { return xi * f(xi); }, 1e-12);
}

}  // namespace

HeatExtension heat_extension(const std::function<double(double)>& f, double t, double x) {
    if (!(t > 0.0)) {
        throw Error(ErrorKind::domain_error, "heat extension needs t > 0");
    }
    require_odd(f);
    boost::math::quadrature::exp_sinh<double> es;
    const double k4t = 4.0 * t;
    auto integrand = [&](double xi) {
        const double fx = f(xi);
        if (fx == 0.0) return 0.0;
        // e^{-(x-xi)^2/4t} - e^{-(x+xi)^2/4t} = e^{-(x-xi)^2/4t} (1 - e^{-x xi / t})
        return std::exp(-(x - xi) * (x - xi) / k4t) * -std::expm1(-x * xi / t) * fx;
    };
    HeatExtension out;
    out.value = es.integrate(integrand, 1e-12) / std::sqrt(std::numbers::pi * k4t);
    out.leading_term = x / (4.0 * kSqrtPi * std::pow(t, 1.5)) * odd_first_moment(f);
    return out;
}

double heat_extension_first_moment(const std::function<double(double)>& f, double t) {
    boost::math::quadrature::exp_sinh<double> es;
    auto u = [&](double x) { return heat_extension(f, t, x).value; };
    return 2.0 * es.integrate([&](double x) { return x * u(x); }, 1e-9);
}

double lambda_density(const BoundaryCurve& c, double x, LambdaOptions opt) {
    if (!(x >= 1.0 && x <= 2.0)) {
        throw Error(ErrorKind::domain_error, "Lambda is defined on [1, 2]");
    }
    if (x > 1.9 && !opt.allow_beyond) {
        throw Error(ErrorKind::domain_error,
                    "tail integral converges slowly for x > 1.9; pass allow_beyond to override");
    }
    const CanonicalParams& p = c.params;
    if (p.theta == 0.0 || x == 1.0) return 0.0;
    const double r = p.rho;
    const double m = c.mu;
    const double k = std::sqrt(x - 1.0);
    const cplx s = stieltjes_sum(c, [&](double v) { return std::exp(-r * v) * std::sin(v * k); }, x);
    double tail = 0.0;
    if (c.size() > 1) {
        const TailModel model = curve_tail(c);
        tail = integrate_to_infinity(
                   [&](double t) {
                       // varphi = a e^{-t}; keep the exponentials together to avoid 0 * inf.
                       const double v = model.varphi(t);
                       const double a = model.amplitude(t);
                       const double da = a - model.amplitude_dt(t);
                       const double sinc = v * k != 0.0 ? std::sin(v * k) / v : k;
                       return cplx(da * a * std::exp(-r * v) * sinc * std::exp((x - 2.0) * t));
                   },
                   model.T)
                   .real();
    }
    const double head = p.theta * std::exp(-m * r) / (1.0 - r) * std::sin(m * k);
    return (head - s.real() - tail) / (std::numbers::pi * x);
}

LambdaDensity sample_lambda_density(const BoundaryCurve& c, const std::vector<double>& xs) {
    LambdaDensity out;
    out.x = xs;
    for (double x : xs) out.lam.push_back(lambda_density(c, x));
    out.lambda0_limit = lambda0_from_density(c);
    return out;
}

double lambda0_from_density(const BoundaryCurve& c) {
    auto f = [&](double e) { return lambda_density(c, 1.0 + e) / std::sqrt(e); };
    return (4.0 * f(1e-3) - f(4e-3)) / 3.0;
}

std::vector<double> phi_lambda(const BoundaryCurve& c, const std::vector<double>& ts) {
    using GL = boost::math::quadrature::gauss<double, 48>;
    const auto& abscissa = GL::abscissa();
    const auto& weights = GL::weights();
    // Nodes on u in [0, 1] with x = 1 + u^2 (symmetric rule mapped from [-1, 1]).
    std::vector<double> us, ws;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
        const double a = abscissa[i];
        us.push_back(0.5 * (1.0 + a));
        ws.push_back(0.5 * weights[i]);
        if (a != 0.0) {
            us.push_back(0.5 * (1.0 - a));
            ws.push_back(0.5 * weights[i]);
        }
    }
    std::vector<double> lam(us.size());
    LambdaOptions opt;
    opt.allow_beyond = true;
    for (std::size_t i = 0; i < us.size(); ++i) {
        lam[i] = lambda_density(c, 1.0 + us[i] * us[i], opt);
    }
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) {
        double sum = 0.0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            const double x = 1.0 + us[i] * us[i];
            sum += ws[i] * lam[i] * std::exp(-t * x) * 2.0 * us[i];
        }
        out.push_back(sum);
    }
    return out;
}

double expansion_eval(double t, const std::vector<double>& lambdas) {
    if (!(t > 0.0)) {
        throw Error(ErrorKind::domain_error, "expansion needs t > 0");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
        if (lambdas[j] == 0.0) continue;
        const double a = static_cast<double>(j) + 1.5;
        sum += lambdas[j] * boost::math::tgamma(a) * std::pow(t, -a);
    }
    return sum * std::exp(-t);
}

double small_time_reference(double t, double rho) {
    if (!(t > 0.0 && t < std::exp(-1.0))) {
        throw Error(ErrorKind::domain_error, "small-time reference needs 0 < t < 1/e");
    }
    return (1.0 + rho) * std::sqrt(2.0 * t * std::log(1.0 / t));
}

double upper_gamma_minus_half(double t) {
    if (!(t > 0.0)) {
        throw Error(ErrorKind::domain_error, "incomplete gamma needs t > 0");
    }
    return 2.0 * (std::exp(-t) / std::sqrt(t) - kSqrtPi * std::erfc(std::sqrt(t)));
}

double d2varphi_dtheta2_at0(double t, double rho) {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw Error(ErrorKind::invalid_params, "rho must lie in (-1, 1)");
    }
    return upper_gamma_minus_half(t) / (2.0 * kSqrtPi * (1.0 - rho) * (1.0 - rho));
}

ThetaCheck first_theta_derivative_check(double rho, double delta, const std::vector<double>& ts,
                                        ThetaCheckOptions opt) {
    if (!(delta > 0.0) || ts.empty()) {
        throw Error(ErrorKind::invalid_params, "need delta > 0 and at least one time");
    }
    const double t_max = opt.t_max > 0.0 ? opt.t_max : *std::max_element(ts.begin(), ts.end());
    auto run = [&](double theta) {
        CanonicalParams p;
        p.rho = rho;
        p.theta = theta;
        const GridSpec g = GridSpec::make(p, t_max, opt.h, opt.dt);
        return extract_boundary(solve(p, g));
    };
    auto fut = std::async(std::launch::async, run, 0.5 * delta);
    const BoundaryCurve full = run(delta);
    const BoundaryCurve half = fut.get();

    ThetaCheck out;
    for (double t : ts) {
        const double vd = varphi_at(full, t);
        const double vh = varphi_at(half, t);
        const double est = 2.0 * vd / (delta * delta);
        const double cf = d2varphi_dtheta2_at0(t, rho);
        out.t.push_back(t);
        out.varphi_delta.push_back(vd);
        out.varphi_half.push_back(vh);
        out.onset_ratio.push_back(vd != 0.0 ? vh / vd : 0.0);
        out.second_derivative_estimate.push_back(est);
        out.closed_form.push_back(cf);
        out.rel_err.push_back(std::abs(est - cf) / cf);
    }
    return out;
}

AsymptoticReport make_report(const BoundaryCurve& curve) {
    const CanonicalParams& p = curve.params;
    AsymptoticReport r;
    r.mu = mu(p);
    r.eta = eta(p);
    r.moment_v1 = first_moment_v1(p);
    r.B1 = b1(p);
    r.lambda0 = lambda0(curve, Lambda0Line::direct);
    r.beta1 = kGamma32 * r.lambda0;
    r.beta1_intro = beta1(curve, Beta1Form::intro);
    r.beta1_parts = beta1(curve, Beta1Form::parts);
    const double t1 = std::min(7.0, curve.t.empty() ? 0.0 : curve.t.back());
    r.tail_fit = tail_law(curve, std::min(4.0, 0.5 * t1), t1).constant;
    r.consistency = std::abs(r.beta1 - r.beta1_parts);
    return r;
}

}  // namespace amput
