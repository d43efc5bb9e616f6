#include "amput/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "amput/error.hpp"

namespace amput {

void LatticeSpec::validate() const {
    market.validate();
    if (steps < 1 || !(T > 0.0)) {
        throw Error(ErrorKind::invalid_params, "lattice needs steps >= 1 and T > 0");
    }
}

namespace {

struct Tree {
    double u, d, p, disc;
};

Tree make_tree(const LatticeSpec& spec) {
    const double dt = spec.T / static_cast<double>(spec.steps);
    Tree tr{};
    tr.u = std::exp(spec.market.sigma * std::sqrt(dt));
    tr.d = 1.0 / tr.u;
    tr.p = (std::exp(spec.market.r * dt) - tr.d) / (tr.u - tr.d);
    tr.disc = std::exp(-spec.market.r * dt);
    if (!(tr.p > 0.0 && tr.p < 1.0)) {
        throw Error(ErrorKind::invalid_params, "risk-neutral probability outside (0, 1); increase steps");
    }
    return tr;
}

double rollback(const LatticeSpec& spec, double s0, bool american) {
    spec.validate();
    if (!(s0 > 0.0)) {
        throw Error(ErrorKind::invalid_params, "spot must be positive");
    }
    const Tree tr = make_tree(spec);
    const std::size_t n = spec.steps;
    const double lu = std::log(tr.u);
    std::vector<double> v(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double s = s0 * std::exp(lu * (2.0 * static_cast<double>(k) - static_cast<double>(n)));
        v[k] = std::max(0.0, 1.0 - s);
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = 0; k <= i; ++k) {
            double c = tr.disc * (tr.p * v[k + 1] + (1.0 - tr.p) * v[k]);
            if (american) {
                const double s = s0 * std::exp(lu * (2.0 * static_cast<double>(k) - static_cast<double>(i)));
                c = std::max(c, 1.0 - s);
            }
            v[k] = c;
        }
    }
    return v[0];
}

}  // namespace

double price_american_put(const LatticeSpec& spec, double s0) {
    return rollback(spec, s0, true);
}

double price_european_put(const LatticeSpec& spec, double s0) {
    return rollback(spec, s0, false);
}

LatticeBoundary extract_lattice_boundary(const LatticeSpec& spec, LatticeRefinement refine) {
    spec.validate();
    const Tree tr = make_tree(spec);
    const std::size_t n = spec.steps;
    const double dt = spec.T / static_cast<double>(n);
    const double lu = std::log(tr.u);
    auto log_s = [&](std::size_t k, std::size_t i) {
        return lu * (2.0 * static_cast<double>(k) - static_cast<double>(i));
    };

    LatticeBoundary lb;
    lb.t.push_back(0.0);
    lb.s_star.push_back(1.0);

    std::vector<double> v(n + 1), prem(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        v[k] = std::max(0.0, 1.0 - std::exp(log_s(k, n)));
    }
    for (std::size_t i = n; i-- > 0;) {
        std::ptrdiff_t last_ex = -1;
        for (std::size_t k = 0; k <= i; ++k) {
            const double c = tr.disc * (tr.p * v[k + 1] + (1.0 - tr.p) * v[k]);
            const double ex = 1.0 - std::exp(log_s(k, i));
            if (ex > 0.0 && ex >= c) {
                last_ex = static_cast<std::ptrdiff_t>(k);
            }
            v[k] = std::max(c, ex);
            prem[k] = v[k] - ex;
        }
        if (last_ex < 0 || i == 0) {
            if (i == 0) lb.price_at_root = v[0];
            if (last_ex < 0) continue;
        }
        const auto m = static_cast<std::size_t>(last_ex);
        if (m + 1 > i) continue;
        const double y0 = log_s(m, i);
        const double y1 = log_s(m + 1, i);
        double ys = 0.5 * (y0 + y1);
        if (refine == LatticeRefinement::sqrt_fit && m + 2 <= i) {
            // Premium over the payoff vanishes quadratically at the boundary.
            const double s1 = std::sqrt(std::max(0.0, prem[m + 1]));
            const double s2 = std::sqrt(std::max(0.0, prem[m + 2]));
            if (s2 > s1) {
                const double y2 = log_s(m + 2, i);
                const double root = y1 - s1 * (y2 - y1) / (s2 - s1);
                if (root >= 2.0 * y0 - y1 && root <= y1) ys = root;
            }
        }
        lb.t.push_back(spec.T - static_cast<double>(i) * dt);
        lb.s_star.push_back(std::min(1.0, std::exp(ys)));
    }
    // Nominal boundary falls with time to expiry; project onto nonincreasing sequences.
    std::vector<double> neg(lb.s_star.size());
    std::transform(lb.s_star.begin(), lb.s_star.end(), neg.begin(), [](double s) { return -s; });
    neg = isotonic_nondecreasing(neg);
    std::transform(neg.begin(), neg.end(), lb.s_star.begin(), [](double s) { return -s; });
    return lb;
}

BoundaryCurve lattice_boundary_to_canonical(const LatticeBoundary& lb, const MarketParams& m) {
    const CanonicalParams cp = from_market(m);
    const double a = *cp.alpha;
    BoundaryCurve curve;
    curve.params = cp;
    curve.mu = mu(cp);
    for (std::size_t i = 0; i < lb.t.size(); ++i) {
        const double t = lb.t[i];
        const double s = lb.s_star[i] * std::exp(m.r * t);
        const double x = m.sigma / std::numbers::sqrt2 * t - std::numbers::sqrt2 / m.sigma * std::log(s);
        const double tc = a * a * t;
        curve.t.push_back(tc);
        curve.phi.push_back(a * x - 2.0 * cp.rho * tc);
    }
    curve.phi_raw = curve.phi;
    curve.finalize();
    return curve;
}

double canonical_to_lattice_price(double t_canonical, double x_shifted, const MarketParams& m) {
    const CanonicalParams cp = from_market(m);
    const double y = x_shifted + 2.0 * cp.rho * t_canonical;
    const CanonicalPoint back = from_canonical_point({t_canonical, y}, m);
    return back.x * std::exp(-m.r * back.t);
}

}  // namespace amput
