#include "amput/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "amput/error.hpp"

namespace amput {

namespace {

constexpr std::size_t kFrontWindow = 6;

// Thomas algorithm for a constant-coefficient tridiagonal system where rows in
// `pinned` are replaced by the identity with zero right-hand side.
void solve_pinned(double diag, double off, const std::vector<double>& rhs, const std::vector<char>& pinned,
                  std::vector<double>& c, std::vector<double>& d, std::vector<double>& out) {
    const std::size_t n = rhs.size();
    auto lower = [&](std::size_t i) { return (i == 0 || pinned[i]) ? 0.0 : off; };
    auto upper = [&](std::size_t i) { return (i + 1 == n || pinned[i]) ? 0.0 : off; };
    auto mid = [&](std::size_t i) { return pinned[i] ? 1.0 : diag; };
    auto r = [&](std::size_t i) { return pinned[i] ? 0.0 : rhs[i]; };

    c[0] = upper(0) / mid(0);
    d[0] = r(0) / mid(0);
    for (std::size_t i = 1; i < n; ++i) {
        const double m = mid(i) - lower(i) * c[i - 1];
        c[i] = upper(i) / m;
        d[i] = (r(i) - lower(i) * d[i - 1]) / m;
    }
    out[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        out[i] = d[i] - c[i] * out[i + 1];
    }
}

}  // namespace

std::size_t GridSpec::zero_index() const {
    return static_cast<std::size_t>(std::llround(-x_left / h()));
}

double GridSpec::x(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(zero_index())) * h();
}

void GridSpec::validate(double mu) const {
    if (!(t_max > 0.0) || nt < 2 || nx < 3) {
        throw Error(ErrorKind::invalid_params, "grid needs t_max > 0, nt >= 2 and nx >= 3");
    }
    if (!(x_left < 0.0 && 0.0 < x_right && mu < x_right)) {
        throw Error(ErrorKind::invalid_params, "grid must satisfy x_left < 0 <= mu < x_right");
    }
    const double k = -x_left / h();
    if (std::abs(k - std::round(k)) > 1e-6) {
        throw Error(ErrorKind::invalid_params, "no grid node at x = 0");
    }
    if (!(psor_omega > 0.0 && psor_omega < 2.0) || !(psor_tol > 0.0) || psor_max_iter == 0) {
        throw Error(ErrorKind::invalid_params, "bad PSOR settings");
    }
    if (snapshot_every == 0) {
        throw Error(ErrorKind::invalid_params, "snapshot_every must be positive");
    }
}

GridSpec GridSpec::make(const CanonicalParams& p, double t_max, double h, double dt) {
    if (!(h > 0.0) || !(dt > 0.0) || !(t_max > 0.0)) {
        throw Error(ErrorKind::invalid_params, "h, dt and t_max must be positive");
    }
    const double m = mu(p);
    const double left = std::max(8.0, 6.0 * std::sqrt(t_max));
    const auto nl = static_cast<std::size_t>(std::ceil(left / h - 1e-9));
    const auto nr = static_cast<std::size_t>(std::ceil((m + 1.0) / h - 1e-9));
    GridSpec g;
    g.t_max = t_max;
    g.nt = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(t_max / dt)));
    g.x_left = -static_cast<double>(nl) * h;
    g.x_right = static_cast<double>(nr) * h;
    g.nx = nl + nr + 1;
    g.snapshot_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.05 / dt)));
    return g;
}

std::vector<double> ObstacleSolution::x_nodes() const {
    std::vector<double> x(grid.nx);
    for (std::size_t j = 0; j < grid.nx; ++j) {
        x[j] = grid.x(j);
    }
    return x;
}

ObstacleSolution solve(const CanonicalParams& p, const GridSpec& g) {
    p.validate();
    ObstacleSolution sol;
    sol.params = p;
    sol.constants = boundary_constants(p);
    g.validate(sol.constants.mu);
    if (sol.constants.mu >= g.x_right - 0.5) {
        throw Error(ErrorKind::invalid_params, "x_right must exceed mu + 0.5");
    }
    sol.grid = g;

    const double h = g.h();
    const double dt = g.dt();
    const std::size_t j0 = g.zero_index();
    // Interior unknowns are nodes 1..nx-2; W = e^{-t} U, Dirichlet zero at both ends.
    const std::size_t n = g.nx - 2;
    const std::size_t i0 = j0 - 1;
    const double rho = p.rho;

    std::vector<double> src(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i + 1);
        if (x > 0.0) {
            src[i] = -(1.0 - rho * rho) * std::exp(rho * x);
        }
    }
    src[i0] = p.theta * (1.0 + rho) / h - 0.5 * (1.0 - rho * rho);

    const double diag = 1.0 / dt + 2.0 / (h * h) + 1.0;
    const double off = -1.0 / (h * h);

    std::vector<double> w(n, 0.0), wn(n, 0.0), rhs(n), c(n), d(n);
    std::vector<char> pinned(n, 0);

    auto record_front = [&](double t) {
        FrontRecord f;
        f.t = t;
        std::ptrdiff_t last = -1;
        for (std::size_t i = n; i-- > 0;) {
            if (w[i] > 0.0) {
                last = static_cast<std::ptrdiff_t>(i + 1);
                break;
            }
        }
        f.last_active = last;
        if (last >= 0) {
            const std::size_t hi = static_cast<std::size_t>(last) + 1;
            const std::size_t lo = hi > kFrontWindow ? hi - kFrontWindow : 0;
            f.first = lo;
            for (std::size_t j = lo; j <= hi; ++j) {
                f.w.push_back((j == 0 || j + 1 >= g.nx) ? 0.0 : w[j - 1]);
            }
        }
        sol.fronts.push_back(std::move(f));
    };
    auto record_snapshot = [&](double t) {
        std::vector<double> u(g.nx, 0.0);
        const double et = std::exp(t);
        for (std::size_t i = 0; i < n; ++i) {
            u[i + 1] = et * w[i];
        }
        sol.snapshot_t.push_back(t);
        sol.u.push_back(std::move(u));
        sol.source_mass.push_back(p.theta * (1.0 + rho) * et);
    };

    record_front(0.0);
    record_snapshot(0.0);

    for (std::size_t k = 1; k <= g.nt; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            rhs[i] = w[i] / dt + src[i];
        }
        if (g.method == LcpMethod::policy_iteration) {
            bool done = false;
            for (std::size_t it = 0; it < 200; ++it) {
                ++sol.lcp_iterations;
                solve_pinned(diag, off, rhs, pinned, c, d, wn);
                bool changed = false;
                for (std::size_t i = 0; i < n; ++i) {
                    char pin = 0;
                    if (pinned[i]) {
                        double aw = 0.0;
                        if (i > 0) aw += off * wn[i - 1];
                        if (i + 1 < n) aw += off * wn[i + 1];
                        pin = aw - rhs[i] > 0.0 ? 1 : 0;
                    } else {
                        // Free rows satisfy the equation exactly; pin only on a sign change.
                        pin = wn[i] < 0.0 ? 1 : 0;
                    }
                    if (pin != pinned[i]) {
                        pinned[i] = pin;
                        changed = true;
                    }
                }
                if (!changed) {
                    done = true;
                    break;
                }
            }
            if (!done) {
                throw Error(ErrorKind::no_convergence,
                            "active-set iteration did not settle at step " + std::to_string(k));
            }
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = pinned[i] ? 0.0 : std::max(0.0, wn[i]);
            }
        } else {
            bool done = false;
            for (std::size_t it = 0; it < g.psor_max_iter; ++it) {
                ++sol.lcp_iterations;
                double change = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double s = rhs[i];
                    if (i > 0) s -= off * w[i - 1];
                    if (i + 1 < n) s -= off * w[i + 1];
                    const double gs = s / diag;
                    const double v = std::max(0.0, w[i] + g.psor_omega * (gs - w[i]));
                    change = std::max(change, std::abs(v - w[i]));
                    w[i] = v;
                }
                if (change < g.psor_tol) {
                    done = true;
                    break;
                }
            }
            if (!done) {
                throw Error(ErrorKind::no_convergence,
                            "PSOR exceeded " + std::to_string(g.psor_max_iter) + " sweeps at step " +
                                std::to_string(k));
            }
            for (std::size_t i = 0; i < n; ++i) {
                pinned[i] = w[i] > 0.0 ? 0 : 1;
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            double aw = diag * w[i];
            if (i > 0) aw += off * w[i - 1];
            if (i + 1 < n) aw += off * w[i + 1];
            // Scale the residual by dt so both arguments are in units of W.
            const double comp = std::min(w[i], (aw - rhs[i]) * dt);
            sol.max_complementarity = std::max(sol.max_complementarity, std::abs(comp));
            sol.min_u = std::min(sol.min_u, w[i]);
        }

        const double t = static_cast<double>(k) * dt;
        record_front(t);
        if (k % g.snapshot_every == 0 || k == g.nt) {
            record_snapshot(t);
        }
    }
    return sol;
}

void BoundaryCurve::finalize() {
    const std::size_t n = t.size();
    varphi.resize(n);
    dphi.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        varphi[i] = mu - phi[i];
    }
    if (n >= 2) {
        dphi[0] = (phi[1] - phi[0]) / (t[1] - t[0]);
        dphi[n - 1] = (phi[n - 1] - phi[n - 2]) / (t[n - 1] - t[n - 2]);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            dphi[i] = (phi[i + 1] - phi[i - 1]) / (t[i + 1] - t[i - 1]);
        }
    }
}

std::vector<double> isotonic_nondecreasing(const std::vector<double>& y) {
    std::vector<double> level;
    std::vector<std::size_t> count;
    for (double v : y) {
        level.push_back(v);
        count.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            const std::size_t c2 = count.back();
            const double v2 = level.back();
            level.pop_back();
            count.pop_back();
            const double c1 = static_cast<double>(count.back());
            level.back() = (level.back() * c1 + v2 * static_cast<double>(c2)) / (c1 + static_cast<double>(c2));
            count.back() += c2;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (std::size_t b = 0; b < level.size(); ++b) {
        out.insert(out.end(), count[b], level[b]);
    }
    return out;
}

namespace {

// Boundary near the cell [x_j, b] from the values next to the front, where
// x_j is the last node with W above the threshold and b = x_j + h the first
// node at rest. The discrete solution behaves like c (b - x)(2 phi - b - x),
// so W/(b - x) is close to linear with root 2 phi - b; a quadratic through
// three nodes absorbs the curvature of the exponential coefficients.
double locate_front(const std::vector<double>& xs, const std::vector<double>& ws, double h) {
    const std::size_t m = ws.size();
    const double xj = xs[m - 1];
    const double b = xj + h;
    if (m >= 3) {
        double px[3], py[3];
        for (int k = 0; k < 3; ++k) {
            px[k] = xs[m - 3 + static_cast<std::size_t>(k)] - b;
            py[k] = ws[m - 3 + static_cast<std::size_t>(k)] / (b - (px[k] + b));
        }
        // Newton form of the interpolating quadratic in u = x - b.
        const double f01 = (py[1] - py[0]) / (px[1] - px[0]);
        const double f12 = (py[2] - py[1]) / (px[2] - px[1]);
        const double f012 = (f12 - f01) / (px[2] - px[0]);
        const double qa = f012;
        const double qb = f01 - f012 * (px[0] + px[1]);
        const double qc = py[0] - f01 * px[0] + f012 * px[0] * px[1];
        const double uj = xj - b;
        double root = std::nan("");
        if (std::abs(qa) < 1e-300 || std::abs(qa * h) < 1e-12 * std::abs(qb)) {
            if (qb != 0.0) root = -qc / qb;
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double q = -0.5 * (qb + std::copysign(sq, qb));
                const double r1 = q / qa;
                const double r2 = q != 0.0 ? qc / q : r1;
                root = std::abs(r1 - uj) < std::abs(r2 - uj) ? r1 : r2;
            }
        }
        if (std::isfinite(root)) {
            const double xr = root + b;
            if (xr >= xj - h && xr <= b + 2.0 * h) {
                return 0.5 * (xr + b);
            }
        }
    }
    if (m >= 2) {
        const double s1 = std::sqrt(ws[m - 1]);
        const double s0 = std::sqrt(ws[m - 2]);
        if (s0 > s1) {
            const double xs0 = xj + s1 * h / (s0 - s1);
            if (xs0 >= xj && xs0 <= b) {
                return xs0;
            }
        }
    }
    return xj + 0.5 * h;
}

}  // namespace

BoundaryCurve extract_boundary(const ObstacleSolution& sol, double threshold) {
    BoundaryCurve curve;
    curve.params = sol.params;
    curve.mu = sol.constants.mu;
    const double h = sol.grid.h();
    const std::size_t nf = sol.fronts.size();
    curve.t.resize(nf);
    curve.phi_raw.assign(nf, 0.0);

    for (std::size_t i = 0; i < nf; ++i) {
        const FrontRecord& f = sol.fronts[i];
        curve.t[i] = f.t;
        if (sol.params.theta == 0.0 || i == 0) {
            continue;
        }
        const double wt = threshold * std::exp(-f.t);
        std::ptrdiff_t last = -1;
        for (std::size_t k = 0; k < f.w.size(); ++k) {
            if (f.w[k] > wt) last = static_cast<std::ptrdiff_t>(k);
        }
        if (f.last_active < 0 || last < 0) {
            throw Error(ErrorKind::degenerate_level,
                        "no active node at t = " + std::to_string(f.t));
        }
        std::vector<double> xs, ws;
        const std::size_t first = last >= 2 ? static_cast<std::size_t>(last) - 2 : 0;
        for (std::size_t k = first; k <= static_cast<std::size_t>(last); ++k) {
            xs.push_back(sol.grid.x(f.first + k));
            ws.push_back(f.w[k]);
        }
        double phi = locate_front(xs, ws, h);
        phi = std::max(phi, 0.0);
        phi = std::min(phi, std::nextafter(curve.mu, 0.0));
        curve.phi_raw[i] = phi;
    }
    curve.phi = isotonic_nondecreasing(curve.phi_raw);
    for (double& v : curve.phi) {
        v = std::min(v, std::nextafter(curve.mu, 0.0));
    }
    if (sol.params.theta == 0.0) {
        curve.phi.assign(nf, 0.0);
    }
    curve.finalize();
    return curve;
}

double SmoothFitResidual::mean_abs_scaled(double t0, double t1) const {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t0 && t[i] <= t1) {
            sum += std::abs(residual[i]) * std::exp(-t[i]);
            ++cnt;
        }
    }
    return cnt ? sum / static_cast<double>(cnt) : 0.0;
}

SmoothFitResidual smooth_fit_residual(const ObstacleSolution& sol, const BoundaryCurve& curve) {
    SmoothFitResidual out;
    out.t = curve.t;
    out.residual.assign(curve.size(), 0.0);
    if (sol.params.theta == 0.0) {
        return out;
    }
    for (std::size_t i = 1; i < curve.size() && i < sol.fronts.size(); ++i) {
        const FrontRecord& f = sol.fronts[i];
        if (f.last_active < 0) continue;
        const auto j = static_cast<std::size_t>(f.last_active);
        const double xj = sol.grid.x(j);
        const double wj = f.w[j - f.first];
        const double gap = curve.phi[i] - xj;
        if (gap <= 0.0) continue;
        // U vanishes at phi; secant slope between the last active node and the boundary.
        out.residual[i] = -std::exp(f.t) * wj / gap;
    }
    return out;
}

double envelope_value(const ObstacleSolution& sol, double t, double x) {
    const GridSpec& g = sol.grid;
    if (!(t >= 0.0 && t <= g.t_max + 1e-12) || !(x >= g.x_left && x <= g.x_right)) {
        throw Error(ErrorKind::out_of_domain, "point outside the solved grid");
    }
    const auto& ts = sol.snapshot_t;
    std::size_t k = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    k = std::clamp<std::size_t>(k, 1, ts.size() - 1);
    const double wt = ts[k] > ts[k - 1] ? std::clamp((t - ts[k - 1]) / (ts[k] - ts[k - 1]), 0.0, 1.0) : 0.0;

    const double h = g.h();
    const double pos = (x - g.x_left) / h;
    std::size_t j = static_cast<std::size_t>(std::floor(pos));
    j = std::min(j, g.nx - 2);
    const double wx = pos - static_cast<double>(j);

    auto at = [&](std::size_t kk) {
        const auto& u = sol.u[kk];
        return (1.0 - wx) * u[j] + wx * u[j + 1];
    };
    const double u = (1.0 - wt) * at(k - 1) + wt * at(k);
    return u + reward_canonical(t, x, sol.params);
}

double envelope_value(const ObstacleSolution& sol, const MarketParams& m, double t, double x) {
    const CanonicalParams cp = from_market(m);
    if (std::abs(cp.rho - sol.params.rho) > 1e-12 || sol.params.theta != 1.0) {
        throw Error(ErrorKind::invalid_params, "solution parameters do not match the market");
    }
    const double a = *cp.alpha;
    const double tc = a * a * t;
    const double y = a * x;
    const double rho = cp.rho;
    // V-hat_rho(t, y) = e^{rho^2 t - rho y} V-hat'(t, y - 2 rho t)
    return std::exp(rho * rho * tc - rho * y) * envelope_value(sol, tc, y - 2.0 * rho * tc);
}

double american_put_price(const ObstacleSolution& sol, const MarketParams& m, double t, double s_nominal) {
    if (!(s_nominal > 0.0)) {
        throw Error(ErrorKind::invalid_params, "spot must be positive");
    }
    const double s = s_nominal * std::exp(m.r * t);
    const double x = m.sigma / std::numbers::sqrt2 * t - std::numbers::sqrt2 / m.sigma * std::log(s);
    return std::exp(-m.r * t) * envelope_value(sol, m, t, x);
}

double stop_on_lines_value(const CanonicalParams& p, double t, double x) {
    const BoundaryConstants bc = boundary_constants(p);
    const double m = bc.mu;
    if (!(t > 0.0) || x >= m) {
        return reward_canonical(t, std::min(x, m), p);
    }
    // V_1(0, xi) = eta e^xi - V(0, xi) for xi < mu, extended oddly about mu.
    auto f = [&](double xi) {
        return bc.eta * std::exp(xi) - (xi > 0.0 ? reward_canonical(0.0, xi, p) : 0.0);
    };
    const double s = 2.0 * std::sqrt(t);
    auto kernel = [&](double y) { return std::exp(-y * y / (4.0 * t)) / (std::sqrt(4.0 * std::numbers::pi * t)); };
    auto integrand = [&](double xi) { return (kernel(x - xi) - kernel(x - (2.0 * m - xi))) * f(xi); };
    const double lo = std::min(x, 0.0) - 12.0 * s - 2.0 * t - 10.0;
    double v1 = 0.0;
    if (m > 0.0) {
        v1 += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, m, 15, 1e-12);
    }
    v1 += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, std::min(0.0, m), 15, 1e-12);
    return bc.eta * std::exp(t + x) - v1;
}

}  // namespace amput

namespace amput {

double boundary_at(const BoundaryCurve& c, double t) {
    if (c.size() == 0) throw Error(ErrorKind::invalid_params, "empty boundary curve");
    if (t <= c.t.front()) return c.phi.front();
    if (t >= c.t.back()) return c.phi.back();
    const auto it = std::upper_bound(c.t.begin(), c.t.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - c.t.begin()) - 1;
    const double w = (t - c.t[i]) / (c.t[i + 1] - c.t[i]);
    return (1.0 - w) * c.phi[i] + w * c.phi[i + 1];
}

}  // namespace amput
