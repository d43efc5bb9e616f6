#include "amput/balayage.hpp"

#include <cmath>

#include "amput/asymptotics.hpp"
#include "amput/canonical.hpp"
#include "amput/error.hpp"

namespace amput {

namespace {

void require_right_of_line(cplx s) {
    if (!(s.real() > 1.0 + kBalayageStandoff)) {
        throw Error(ErrorKind::domain_error, "Re s must exceed 1 + 0.05");
    }
}

BalayageResidual package(cplx s, cplx lhs, cplx rhs, double tail) {
    BalayageResidual r;
    r.s = s;
    r.lhs = lhs;
    r.rhs = rhs;
    r.abs_err = std::abs(lhs - rhs);
    r.rel_err = std::abs(rhs) > 0.0 ? r.abs_err / std::abs(rhs) : r.abs_err;
    r.tail_estimate = tail;
    return r;
}

// (e^u - 1 - u) / u^2 without cancellation near 0.
cplx e2_over_sq(cplx u) {
    if (std::abs(u) < 1.0) {
        cplx sum = 0.0, term = 0.5;
        for (int k = 2; k < 40; ++k) {
            sum += term;
            term *= u / double(k + 1);
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(u) - 1.0 - u) / (u * u);
}

// (e^u - 1) / u without cancellation near 0.
cplx e1_over_u(cplx u) {
    if (std::abs(u) < 1e-4) return 1.0 + u / 2.0 + u * u / 6.0;
    return (std::exp(u) - 1.0) / u;
}

// Average over z +- eps, z +- i eps: cancels the second-order term at a removable singularity.
template <class F>
cplx removable_average(F&& f, cplx z) {
    const double eps = 1e-3;
    const cplx i(0.0, 1.0);
    return 0.25 * (f(z + eps) + f(z - eps) + f(z + i * eps) + f(z - i * eps));
}

cplx phi_direct(const BoundaryCurve& c, cplx z) {
    if (!(z.real() > 0.0) || !((z * z).real() > 0.0)) {
        throw Error(ErrorKind::domain_error, "direct transform needs Re z > 0 and Re z^2 > 0");
    }
    const cplx k = z * z - 1.0;
    cplx sum = trapezoid(c, [&](double t, double v) { return v * std::exp(-k * t); });
    if (c.params.theta == 0.0 || c.size() < 2) return sum;
    const TailModel m = curve_tail(c);
    const cplx z2 = z * z;
    sum += integrate_to_infinity([&](double t) { return m.amplitude(t) * std::exp(-z2 * t); }, m.T);
    return sum;
}

cplx phi_continued_raw(const BoundaryCurve& c, cplx z) {
    return (g_closed_form(z, c.params) + e2_integral(c, z)) / (z + c.params.rho);
}

}  // namespace

cplx balayage_lhs(const BoundaryCurve& c, cplx s, double* tail_estimate) {
    require_right_of_line(s);
    const double r = c.params.rho;
    const cplx w = r + std::sqrt(s);
    const cplx k = s - 1.0;
    // Product rule: e^{-v w} linear in t on each step, e^{-k t} integrated exactly.
    cplx sum = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const cplx g = 0.5 * (std::exp(-c.varphi[i] * w) + std::exp(-c.varphi[i + 1] * w));
        sum += g * (c.t[i + 1] - c.t[i]) * exp_step_average(-k, c.t[i], c.t[i + 1]);
    }
    const double T = c.size() ? c.t.back() : 0.0;
    sum += std::exp(-k * T) / k;
    if (tail_estimate) {
        const double vT = c.size() ? c.varphi.back() : 0.0;
        *tail_estimate = std::abs(w) * std::abs(vT) * std::exp(-k.real() * T) / k.real();
    }
    return sum;
}

cplx balayage_rhs(cplx s, const CanonicalParams& p) {
    if (s == cplx(1.0)) throw Error(ErrorKind::pole_error, "balayage right side has a pole at s = 1");
    const double m = mu(p);
    const cplx z = std::sqrt(s);
    const double r = p.rho;
    return std::exp(-m * r) / (1.0 - r) * (1.0 - r + p.theta * (r + z)) / (s - 1.0) * std::exp(-m * z);
}

BalayageResidual residual(const BoundaryCurve& c, cplx s) {
    double tail = 0.0;
    const cplx lhs = balayage_lhs(c, s, &tail);
    return package(s, lhs, balayage_rhs(s, c.params), tail);
}

BalayageResidual derivative_identity_residual(const BoundaryCurve& c, cplx s, DerivativeMode mode) {
    require_right_of_line(s);
    const CanonicalParams& p = c.params;
    const double r = p.rho;
    const cplx z = std::sqrt(s);
    const cplx w = r + z;
    const cplx k = s - 1.0;
    const double m = mu(p);
    const cplx rhs = p.theta * std::exp(-m * r) / (1.0 - r) * std::exp(-m * z);
    if (p.theta == 0.0) return package(s, 0.0, rhs, 0.0);

    cplx lhs;
    if (mode == DerivativeMode::stieltjes) {
        lhs = stieltjes_sum(c, [&](double v) { return std::exp(-v * w); }, -k);
    } else {
        cplx sum = 0.0;
        for (std::size_t i = 0; i + 1 < c.size(); ++i) {
            auto f = [&](std::size_t j) { return std::abs(c.dphi[j]) * std::exp(-c.varphi[j] * w - k * c.t[j]); };
            sum += 0.5 * (c.t[i + 1] - c.t[i]) * (f(i) + f(i + 1));
        }
        lhs = sum;
    }
    // Past t_max the deviation decays like e^{-t}, so |varphi'| ~ varphi.
    const double T = c.t.back();
    const cplx tail = c.varphi.back() * std::exp(-k * T) / s;
    lhs += tail;
    return package(s, lhs, rhs, std::abs(tail));
}

FluxIdentity flux_identity(const BoundaryCurve& c) {
    FluxIdentity f;
    const CanonicalParams& p = c.params;
    if (p.theta == 0.0) return f;
    const double r = p.rho;
    f.target = p.theta * std::exp(-c.mu * r) / (1.0 - r);
    f.sum = stieltjes_sum(c, [&](double v) { return std::exp(-r * v); }, 1.0).real();
    f.tail = curve_tail(c).flux_tail();
    f.integral = f.sum + f.tail;
    f.residual = std::abs(f.integral - f.target);
    return f;
}

double flux_identity_residual(const BoundaryCurve& c) {
    return flux_identity(c).residual;
}

cplx taylor_partial_sum(cplx z, int N) {
    cplx sum = 0.0, term = 1.0;
    for (int k = 0; k <= N; ++k) {
        if (k > 0) term *= z / double(k);
        sum += term;
    }
    return sum;
}

cplx taylor_remainder(cplx z, int N) {
    if (N < 0) throw Error(ErrorKind::invalid_params, "N must be nonnegative");
    if (std::abs(z) > N + 2.0) return std::exp(z) - taylor_partial_sum(z, N);
    cplx term = 1.0;
    for (int k = 1; k <= N + 1; ++k) term *= z / double(k);
    cplx sum = 0.0;
    for (int k = N + 1; k < N + 200; ++k) {
        sum += term;
        term *= z / double(k + 1);
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

cplx g_closed_form(cplx z, const CanonicalParams& p) {
    const double r = p.rho;
    const double m = mu(p);
    const cplx q = z * z - 1.0;
    const cplx reflected = std::exp(-m * r) / (1.0 - r) * (1.0 - r + p.theta * (z + r)) * std::exp(-m * z);
    return (1.0 - reflected) / q;
}

cplx e2_integral(const BoundaryCurve& c, cplx z) {
    const double r = c.params.rho;
    const cplx w = r + z;
    const cplx k = z * z - 1.0;
    if (c.params.theta == 0.0 || c.size() < 2) return 0.0;
    // E_2(-w v) = (w v)^2 (e^u - 1 - u)/u^2 with u = -w v.
    cplx sum = trapezoid(c, [&](double t, double v) {
        const cplx u = -w * v;
        return w * w * v * v * e2_over_sq(u) * std::exp(-k * t);
    });
    const TailModel m = curve_tail(c);
    const cplx z2p1 = z * z + 1.0;
    sum += integrate_to_infinity(
        [&](double t) {
            const double a = m.amplitude(t);
            const cplx u = -w * m.varphi(t);
            return w * w * a * a * e2_over_sq(u) * std::exp(-z2p1 * t);
        },
        m.T);
    return sum;
}

cplx phi_transform(const BoundaryCurve& c, cplx z, PhiMode mode) {
    if (mode == PhiMode::direct) return phi_direct(c, z);
    if (!((z * z).real() > -1.0)) throw Error(ErrorKind::domain_error, "continued transform needs Re z^2 > -1");
    if (std::abs(z + 1.0) < 1e-12) throw Error(ErrorKind::pole_error, "continued transform has a pole at z = -1");
    if (c.params.theta == 0.0) return 0.0;
    const double near = 1e-5;
    if (std::abs(z + c.params.rho) < near || std::abs(z - 1.0) < near) {
        return removable_average([&](cplx y) { return phi_continued_raw(c, y); }, z);
    }
    return phi_continued_raw(c, z);
}

cplx psi_transform(const BoundaryCurve& c, cplx z, PsiMode mode) {
    const CanonicalParams& p = c.params;
    if (p.theta == 0.0) return 0.0;
    const cplx k = z * z - 1.0;
    switch (mode) {
        case PsiMode::from_phi:
            return c.mu - k * phi_transform(c, z, PhiMode::continued);
        case PsiMode::direct: {
            if (!((z * z).real() > 0.0)) throw Error(ErrorKind::domain_error, "direct form needs Re z^2 > 0");
            cplx sum = stieltjes_sum(c, [](double) { return 1.0; }, -k);
            const TailModel m = curve_tail(c);
            const cplx z2 = z * z;
            sum += integrate_to_infinity(
                [&](double t) { return (m.amplitude(t) - m.amplitude_dt(t)) * std::exp(-z2 * t); }, m.T);
            return sum;
        }
        case PsiMode::e1_form: {
            if (!((z * z).real() > -1.0)) throw Error(ErrorKind::domain_error, "Psi needs Re z^2 > -1");
            const double r = p.rho;
            const cplx w = z + r;
            const cplx head = p.theta * std::exp(-c.mu * w) / (1.0 - r);
            // int |varphi'| E_1(-varphi w) e^{-(z^2-1) t} dt with E_1(u) = u (e^u - 1)/u.
            cplx body = stieltjes_sum(
                c, [&](double v) { return std::exp(-v * w) - 1.0; }, -k);
            const TailModel m = curve_tail(c);
            const cplx z2p1 = z * z + 1.0;
            body += integrate_to_infinity(
                [&](double t) {
                    const double a = m.amplitude(t);
                    const cplx u = -w * m.varphi(t);
                    return -(a - m.amplitude_dt(t)) * a * w * e1_over_u(u) * std::exp(-z2p1 * t);
                },
                m.T);
            return head - body;
        }
    }
    return 0.0;
}

}  // namespace amput
