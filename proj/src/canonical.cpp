#include "amput/canonical.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "amput/error.hpp"

namespace amput {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_params: return "invalid-params";
        case ErrorKind::no_convergence: return "no-convergence";
        case ErrorKind::domain_error: return "domain-error";
        case ErrorKind::pole_error: return "pole-error";
        case ErrorKind::degenerate_level: return "degenerate-level";
        case ErrorKind::out_of_domain: return "out-of-domain";
        case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

void MarketParams::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw Error(ErrorKind::invalid_params, "interest rate must be positive, got " + std::to_string(r));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::invalid_params, "volatility must be positive, got " + std::to_string(sigma));
    }
}

void CanonicalParams::validate() const {
    if (!(rho > -1.0 && rho < 1.0)) {
        throw Error(ErrorKind::invalid_params, "rho must lie in (-1, 1), got " + std::to_string(rho));
    }
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw Error(ErrorKind::invalid_params, "theta must be nonnegative, got " + std::to_string(theta));
    }
    if (alpha && !(*alpha > 0.0)) {
        throw Error(ErrorKind::invalid_params, "alpha must be positive");
    }
}

CanonicalParams from_market(const MarketParams& m) {
    m.validate();
    const double s2 = m.sigma * m.sigma;
    CanonicalParams p;
    p.alpha = (s2 + 2.0 * m.r) / (2.0 * std::numbers::sqrt2 * m.sigma);
    p.rho = (s2 - 2.0 * m.r) / (s2 + 2.0 * m.r);
    p.theta = 1.0;
    return p;
}

double reward_original(double t, double s, double r) {
    return std::max(0.0, std::exp(r * t) - s);
}

CanonicalPoint to_canonical_point(double t, double s, const MarketParams& m) {
    if (!(s > 0.0)) {
        throw Error(ErrorKind::invalid_params, "stock price must be positive");
    }
    const CanonicalParams p = from_market(m);
    const double x = m.sigma / std::numbers::sqrt2 * t - std::numbers::sqrt2 / m.sigma * std::log(s);
    const double a = *p.alpha;
    return {a * a * t, a * x};
}

CanonicalPoint from_canonical_point(CanonicalPoint c, const MarketParams& m) {
    const CanonicalParams p = from_market(m);
    const double a = *p.alpha;
    const double t = c.t / (a * a);
    const double x = c.x / a;
    const double log_s = (m.sigma / std::numbers::sqrt2 * t - x) * m.sigma / std::numbers::sqrt2;
    return {t, std::exp(log_s)};
}

double reward_market(double t, double x, const MarketParams& m) {
    const double s2 = m.sigma * m.sigma;
    return std::max(0.0, std::exp(m.r * t) - std::exp(0.5 * s2 * t - m.sigma * x / std::numbers::sqrt2));
}

double reward_rho(double t, double x, double rho) {
    const double a = 1.0 + rho;
    return std::max(0.0, std::exp((1.0 - rho * rho) * t) - std::exp(a * a * t - a * x));
}

namespace {

// Coefficients of e^{t-x} and e^{t+x} in the quadrant formula.
double minus_coefficient(const CanonicalParams& p) {
    return 0.5 * (1.0 + p.theta - p.rho + p.theta * p.rho);
}

double plus_coefficient(const CanonicalParams& p) {
    return 0.5 * (1.0 - p.theta) * (1.0 + p.rho);
}

}  // namespace

double reward_canonical(double t, double x, const CanonicalParams& p) {
    if (!(x > 0.0) || t < 0.0) {
        return 0.0;
    }
    return std::exp(t + p.rho * x) - minus_coefficient(p) * std::exp(t - x) -
           plus_coefficient(p) * std::exp(t + x);
}

double reward_canonical_dx(double t, double x, const CanonicalParams& p) {
    if (!(x > 0.0) || t < 0.0) {
        return 0.0;
    }
    return p.rho * std::exp(t + p.rho * x) + minus_coefficient(p) * std::exp(t - x) -
           plus_coefficient(p) * std::exp(t + x);
}

double mu(const CanonicalParams& p) {
    p.validate();
    return std::log1p(p.theta * (1.0 + p.rho) / (1.0 - p.rho)) / (1.0 + p.rho);
}

double eta(const CanonicalParams& p) {
    const double m = mu(p);
    // e^{(rho-1)mu} - 1 + theta, written with expm1 so theta -> 0 stays accurate.
    return 0.5 * (1.0 + p.rho) * (std::expm1((p.rho - 1.0) * m) + p.theta);
}

BoundaryConstants boundary_constants(const CanonicalParams& p) {
    return {mu(p), eta(p)};
}

std::vector<double> unshift_boundary(std::span<const double> t, std::span<const double> x_shifted,
                                     double rho) {
    if (t.size() != x_shifted.size()) {
        throw Error(ErrorKind::invalid_params, "time and position samples differ in length");
    }
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out[i] = x_shifted[i] + 2.0 * rho * t[i];
    }
    return out;
}

std::vector<double> shift_boundary(std::span<const double> t, std::span<const double> x_preshift,
                                   double rho) {
    if (t.size() != x_preshift.size()) {
        throw Error(ErrorKind::invalid_params, "time and position samples differ in length");
    }
    std::vector<double> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        out[i] = x_preshift[i] - 2.0 * rho * t[i];
    }
    return out;
}

}  // namespace amput
