#include "amput/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "amput/lattice.hpp"

namespace amput::cli {

namespace {

const char* const kModes[] = {"solve", "balayage", "asymptotics", "lattice", "perturb", "transform", "plotdata"};

// Shortest round-trip form, with ".0" kept on integral values.
std::string json_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0') throw Error(ErrorKind::invalid_params, "bad number '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || text.substr(0, eq) != "rho") {
        throw Error(ErrorKind::invalid_params, "sweep must look like rho=v1,v2,...");
    }
    auto values = parse_list(text.substr(eq + 1));
    if (values.empty()) throw Error(ErrorKind::invalid_params, "empty sweep");
    return values;
}

std::size_t sweep_threads() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("AMPUT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) n = static_cast<std::size_t>(v);
    }
    return n;
}

CanonicalParams effective_params(const RunConfig& c) {
    return c.market ? from_market(*c.market) : c.params;
}

// Parameters for a stored curve: explicit values win, then the solve metadata next to it.
CanonicalParams curve_params(const RunConfig& c) {
    if (c.params_given) return effective_params(c);
    const fs::path meta = c.boundary.parent_path() / "solution.json";
    if (fs::exists(meta)) {
        const json j = read_json(meta);
        CanonicalParams p;
        p.rho = j.at("params").at("rho").get<double>();
        p.theta = j.at("params").at("theta").get<double>();
        if (j.at("params").contains("alpha")) p.alpha = j["params"]["alpha"].get<double>();
        return p;
    }
    return c.params;
}

fs::path input_boundary(const RunConfig& c) {
    const fs::path path = c.boundary.empty() ? c.output_dir / "boundary.csv" : c.boundary;
    if (!fs::exists(path)) throw Error(ErrorKind::io_error, "boundary file not found: " + path.string());
    return path;
}

json curve_json(const BoundaryCurve& c) {
    return json{{"t", c.t}, {"phi", c.phi}, {"varphi", c.varphi}, {"dphi", c.dphi}};
}

void solve_one(const RunConfig& c, const CanonicalParams& p, const fs::path& dir, std::ostream& out) {
    GridSpec g = GridSpec::make(p, c.t_max, c.h, c.dt);
    g.method = c.method;
    const ObstacleSolution sol = solve(p, g);
    const BoundaryCurve curve = extract_boundary(sol);
    if (c.format == Format::json) {
        write_json(dir / "boundary.json", curve_json(curve));
    } else {
        write_boundary_csv(dir / "boundary.csv", curve);
    }
    json meta{{"params", to_json(p)},
              {"grid", to_json(g)},
              {"mu", sol.constants.mu},
              {"eta", sol.constants.eta},
              {"phi_end", curve.phi.back()},
              {"varphi_end", curve.varphi.back()},
              {"max_complementarity", sol.max_complementarity},
              {"min_u", sol.min_u},
              {"lcp_iterations", sol.lcp_iterations}};
    write_json(dir / "solution.json", meta);
    out << "solve rho=" << json_number(p.rho) << " theta=" << json_number(p.theta)
        << " phi(t_max)=" << fmt_double(curve.phi.back()) << " -> " << dir.string() << "\n";
}

int do_solve(const RunConfig& c, std::ostream& out) {
    if (c.sweep_rho.empty()) {
        solve_one(c, effective_params(c), c.output_dir, out);
        return kExitOk;
    }
    const std::size_t cap = sweep_threads();
    std::vector<std::ostringstream> logs(c.sweep_rho.size());
    for (std::size_t first = 0; first < c.sweep_rho.size(); first += cap) {
        std::vector<std::future<void>> jobs;
        for (std::size_t i = first; i < std::min(first + cap, c.sweep_rho.size()); ++i) {
            jobs.push_back(std::async(std::launch::async, [&, i] {
                CanonicalParams p = effective_params(c);
                p.rho = c.sweep_rho[i];
                p.alpha.reset();
                p.validate();
                solve_one(c, p, c.output_dir / ("rho_" + json_number(p.rho)), logs[i]);
            }));
        }
        for (auto& j : jobs) j.get();
    }
    for (const auto& l : logs) out << l.str();
    return kExitOk;
}

int do_balayage(const RunConfig& c, std::ostream& out) {
    const BoundaryCurve curve = read_boundary_csv(input_boundary(c), curve_params(c));
    std::vector<BalayageResidual> rows, deriv;
    for (const cplx s : c.s_values) {
        rows.push_back(residual(curve, s));
        deriv.push_back(derivative_identity_residual(curve, s));
    }
    const FluxIdentity flux = flux_identity(curve);
    if (c.format == Format::json) {
        auto table = [](const std::vector<BalayageResidual>& rs) {
            json a = json::array();
            for (const auto& r : rs) {
                a.push_back({{"re_s", r.s.real()},      {"im_s", r.s.imag()},       {"lhs_re", r.lhs.real()},
                             {"lhs_im", r.lhs.imag()},  {"rhs_re", r.rhs.real()},   {"rhs_im", r.rhs.imag()},
                             {"abs_err", r.abs_err},    {"rel_err", r.rel_err},     {"tail_estimate", r.tail_estimate}});
            }
            return a;
        };
        write_json(c.output_dir / "residuals.json", table(rows));
        write_json(c.output_dir / "derivative_residuals.json", table(deriv));
    } else {
        write_residual_table(c.output_dir / "residuals.csv", rows);
        write_residual_table(c.output_dir / "derivative_residuals.csv", deriv);
    }
    write_json(c.output_dir / "flux.json", json{{"sum", flux.sum},
                                                {"tail", flux.tail},
                                                {"integral", flux.integral},
                                                {"target", flux.target},
                                                {"residual", flux.residual}});
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.rel_err);
    out << "balayage max rel_err " << fmt_double(worst) << ", flux residual " << fmt_double(flux.residual) << "\n";
    return kExitOk;
}

int do_asymptotics(const RunConfig& c, std::ostream& out) {
    const BoundaryCurve curve = read_boundary_csv(input_boundary(c), curve_params(c));
    const json report = to_json(make_report(curve));
    write_json(c.output_dir / "report.json", report);
    out << report.dump(2) << "\n";
    return kExitOk;
}

int do_lattice(const RunConfig& c, std::ostream& out) {
    const MarketParams m = c.market.value_or(MarketParams{1.0, std::sqrt(2.0)});
    const LatticeSpec spec{c.steps, c.expiry, m};
    spec.validate();
    const LatticeBoundary lb = extract_lattice_boundary(spec);
    write_lattice_csv(c.output_dir / "lattice_boundary.csv", lb, m);

    const CanonicalParams p = from_market(m);
    const BoundaryCurve lat = lattice_boundary_to_canonical(lb, m);
    const double t_canon = *p.alpha * *p.alpha * c.expiry;
    const ObstacleSolution sol = solve(p, GridSpec::make(p, t_canon, c.h, c.dt));
    const BoundaryCurve obs = extract_boundary(sol);

    std::ostringstream table;
    table << "t,x_lattice,x_obstacle,diff\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const double x_obs = boundary_at(obs, lat.t[i]);
        const double d = lat.phi[i] - x_obs;
        if (lat.t[i] >= 0.5) worst = std::max(worst, std::abs(d));
        table << fmt_double(lat.t[i]) << ',' << fmt_double(lat.phi[i]) << ',' << fmt_double(x_obs) << ','
              << fmt_double(d) << '\n';
    }
    write_text(c.output_dir / "lattice_comparison.csv", table.str());
    const double price_obs = american_put_price(sol, m, c.expiry, 1.0);
    write_json(c.output_dir / "lattice_comparison.json", json{{"max_abs_diff", worst},
                                                               {"price_lattice", lb.price_at_root},
                                                               {"price_obstacle", price_obs},
                                                               {"price_diff", lb.price_at_root - price_obs}});
    out << "lattice max |dx| on t>=0.5: " << fmt_double(worst) << ", root prices " << fmt_double(lb.price_at_root)
        << " vs " << fmt_double(price_obs) << "\n";
    return kExitOk;
}

int do_perturb(const RunConfig& c, std::ostream& out) {
    ThetaCheckOptions opt;
    if (c.grid_given) {
        opt.h = c.h;
        opt.dt = c.dt;
    }
    const ThetaCheck chk = first_theta_derivative_check(effective_params(c).rho, c.delta, c.times, opt);
    std::ostringstream table;
    table << "t,varphi_delta,varphi_half,onset_ratio,second_derivative_estimate,closed_form,rel_err\n";
    for (std::size_t i = 0; i < chk.t.size(); ++i) {
        table << fmt_double(chk.t[i]) << ',' << fmt_double(chk.varphi_delta[i]) << ','
              << fmt_double(chk.varphi_half[i]) << ',' << fmt_double(chk.onset_ratio[i]) << ','
              << fmt_double(chk.second_derivative_estimate[i]) << ',' << fmt_double(chk.closed_form[i]) << ','
              << fmt_double(chk.rel_err[i]) << '\n';
    }
    write_text(c.output_dir / "perturb.csv", table.str());
    out << table.str();
    return kExitOk;
}

int do_transform(const RunConfig& c, std::ostream& out) {
    if (!c.market) throw Error(ErrorKind::invalid_params, "transform needs --r and --sigma");
    const CanonicalParams p = from_market(*c.market);
    out << "{\"alpha\": " << json_number(*p.alpha) << ", \"rho\": " << json_number(p.rho) << "}\n";
    return kExitOk;
}

int do_plotdata(const RunConfig& c, std::ostream& out) {
    const BoundaryCurve curve = read_boundary_csv(input_boundary(c), curve_params(c));
    AsymptoticReport rep;
    if (!c.report.empty()) {
        const json j = read_json(c.report);
        rep.mu = j.at("mu").get<double>();
        rep.B1 = j.at("B1").get<double>();
        rep.beta1 = j.at("beta1").get<double>();
    } else {
        rep = make_report(curve);
    }
    const fs::path path = c.output_dir / "plot.csv";
    emit_plot_data(curve, rep, path);
    out << "plot data -> " << path.string() << "\n";
    return kExitOk;
}

// Copies config-file values into the RunConfig; unknown keys are rejected.
void apply_json(RunConfig& c, const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::invalid_params, "config must be a JSON object");
    std::optional<double> r, sigma;
    for (const auto& [key, v] : j.items()) {
        if (key == "mode") c.mode = v.get<std::string>();
        else if (key == "rho") { c.params.rho = v.get<double>(); c.params_given = true; }
        else if (key == "theta") { c.params.theta = v.get<double>(); c.params_given = true; }
        else if (key == "r") r = v.get<double>();
        else if (key == "sigma") sigma = v.get<double>();
        else if (key == "tmax" || key == "t_max") c.t_max = v.get<double>();
        else if (key == "h") { c.h = v.get<double>(); c.grid_given = true; }
        else if (key == "dt") { c.dt = v.get<double>(); c.grid_given = true; }
        else if (key == "method") c.method = v.get<std::string>() == "psor" ? LcpMethod::psor : LcpMethod::policy_iteration;
        else if (key == "output_dir") c.output_dir = v.get<std::string>();
        else if (key == "format") c.format = v.get<std::string>() == "json" ? Format::json : Format::csv;
        else if (key == "boundary") c.boundary = v.get<std::string>();
        else if (key == "report") c.report = v.get<std::string>();
        else if (key == "steps") c.steps = v.get<std::size_t>();
        else if (key == "expiry") c.expiry = v.get<double>();
        else if (key == "delta") c.delta = v.get<double>();
        else if (key == "times") c.times = v.get<std::vector<double>>();
        else if (key == "sweep_rho") c.sweep_rho = v.get<std::vector<double>>();
        else if (key == "s") {
            c.s_values.clear();
            for (const auto& e : v) c.s_values.push_back(e.is_string() ? parse_complex(e.get<std::string>()) : cplx(e.get<double>()));
        } else {
            throw Error(ErrorKind::invalid_params, "unknown config key '" + key + "'");
        }
    }
    if (r || sigma) {
        if (!(r && sigma)) throw Error(ErrorKind::invalid_params, "config needs both r and sigma");
        c.market = MarketParams{*r, *sigma};
        c.params_given = true;
    }
}

}  // namespace

void RunConfig::validate() const {
    if (std::find(std::begin(kModes), std::end(kModes), mode) == std::end(kModes)) {
        throw Error(ErrorKind::invalid_params, "unknown mode '" + mode + "'");
    }
    if (market) market->validate();
    else params.validate();
    if (!(t_max > 0.0) || !(h > 0.0) || !(dt > 0.0)) throw Error(ErrorKind::invalid_params, "grid sizes must be positive");
    if (!(delta > 0.0)) throw Error(ErrorKind::invalid_params, "delta must be positive");
    if (!report.empty() && !fs::exists(report)) throw Error(ErrorKind::io_error, "report not found: " + report.string());
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_params:
        case ErrorKind::domain_error:
        case ErrorKind::pole_error:
        case ErrorKind::out_of_domain:
            return kExitInvalid;
        case ErrorKind::no_convergence:
        case ErrorKind::degenerate_level:
            return kExitNoConvergence;
        case ErrorKind::io_error:
            return kExitIo;
    }
    return kExitInvalid;
}

cplx parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text) {
        if (ch != ' ') s += ch;
    }
    if (s.empty()) throw Error(ErrorKind::invalid_params, "empty complex number");
    if (s.back() != 'i') {
        const auto v = parse_list(s);
        if (v.size() != 1) throw Error(ErrorKind::invalid_params, "bad complex number '" + text + "'");
        return v[0];
    }
    // split at the last sign that is not an exponent sign
    std::size_t cut = std::string::npos;
    for (std::size_t k = s.size() - 1; k > 0; --k) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            cut = k;
            break;
        }
    }
    const std::string re = cut == std::string::npos ? "0" : s.substr(0, cut);
    std::string im = s.substr(cut == std::string::npos ? 0 : cut);
    im.pop_back();
    if (im == "+" || im.empty()) im = "1";
    if (im == "-") im = "-1";
    const auto a = parse_list(re);
    const auto b = parse_list(im);
    if (a.size() != 1 || b.size() != 1) throw Error(ErrorKind::invalid_params, "bad complex number '" + text + "'");
    return {a[0], b[0]};
}

void emit_plot_data(const BoundaryCurve& curve, const AsymptoticReport& rep, const fs::path& path) {
    std::ostringstream table;
    table << "t,phi,mu_line,lemma_lower_bound,expansion_n0\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double t = curve.t[i];
        double lower = 0.0, expansion = 0.0;
        if (t > 0.0 && rep.mu > 0.0) {
            const double decay = std::pow(t, -1.5) * std::exp(-t);
            lower = std::max(0.0, rep.mu - rep.B1 * decay);
            expansion = std::max(0.0, rep.mu - rep.beta1 * decay);
        }
        table << fmt_double(t) << ',' << fmt_double(curve.phi[i]) << ',' << fmt_double(rep.mu) << ','
              << fmt_double(lower) << ',' << fmt_double(expansion) << '\n';
    }
    write_text(path, table.str());
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        c.validate();
        if (c.mode != "transform") fs::create_directories(c.output_dir);
        if (c.mode == "solve") return do_solve(c, out);
        if (c.mode == "balayage") return do_balayage(c, out);
        if (c.mode == "asymptotics") return do_asymptotics(c, out);
        if (c.mode == "lattice") return do_lattice(c, out);
        if (c.mode == "perturb") return do_perturb(c, out);
        if (c.mode == "transform") return do_transform(c, out);
        return do_plotdata(c, out);
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        err << "error (io): " << e.what() << "\n";
        return kExitIo;
    } catch (const json::exception& e) {
        err << "error (config): " << e.what() << "\n";
        return kExitInvalid;
    }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"American put free boundary in canonical heat-equation coordinates"};
    app.require_subcommand(0, 1);
    app.set_help_flag("--help", "print this help and exit");

    std::string config_path, method, format, sweep, s_list, times, output_dir, boundary, report;
    double rho = 0, theta = 1, r = 0, sigma = 0, tmax = 0, h = 0, dt = 0, expiry = 0, delta = 0;
    std::size_t steps = 0;

    auto* o_config = app.add_option("--config", config_path, "flat JSON config; flags override it");
    auto* o_rho = app.add_option("--rho", rho, "canonical rho in (-1, 1)");
    auto* o_theta = app.add_option("--theta", theta, "line-mass scale theta >= 0");
    auto* o_r = app.add_option("--r", r, "interest rate");
    auto* o_sigma = app.add_option("--sigma", sigma, "volatility");
    auto* o_tmax = app.add_option("--tmax", tmax, "canonical time horizon");
    auto* o_h = app.add_option("--h", h, "space step");
    auto* o_dt = app.add_option("--dt", dt, "time step");
    auto* o_method = app.add_option("--method", method, "policy or psor")->check(CLI::IsMember({"policy", "psor"}));
    auto* o_out = app.add_option("--out,--output-dir", output_dir, "output directory");
    auto* o_format = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* o_boundary = app.add_option("--boundary", boundary, "boundary CSV from solve");
    auto* o_report = app.add_option("--report", report, "report JSON from asymptotics");
    auto* o_s = app.add_option("--s", s_list, "Laplace points, e.g. 2,4,9,4+2i");
    auto* o_steps = app.add_option("--steps", steps, "lattice steps");
    auto* o_expiry = app.add_option("--expiry", expiry, "lattice expiry in market time");
    auto* o_delta = app.add_option("--delta", delta, "theta for the perturbation check");
    auto* o_times = app.add_option("--times", times, "comma-separated sample times");
    auto* o_sweep = app.add_option("--sweep", sweep, "rho=v1,v2,... solves concurrently");

    std::vector<CLI::App*> subs;
    for (const char* m : kModes) {
        auto* sub = app.add_subcommand(m, std::string("run ") + m)->fallthrough();
        sub->set_help_flag("--help", "print this help and exit");
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    RunConfig c;
    try {
        if (*o_config) apply_json(c, read_json(config_path));
        for (auto* s : subs) {
            if (s->parsed()) c.mode = s->get_name();
        }
        if (*o_rho) { c.params.rho = rho; c.params_given = true; }
        if (*o_theta) { c.params.theta = theta; c.params_given = true; }
        if (*o_r || *o_sigma) {
            if (!(*o_r && *o_sigma) && !c.market) throw Error(ErrorKind::invalid_params, "--r and --sigma go together");
            MarketParams m = c.market.value_or(MarketParams{});
            if (*o_r) m.r = r;
            if (*o_sigma) m.sigma = sigma;
            c.market = m;
            c.params_given = true;
        }
        if (*o_tmax) c.t_max = tmax;
        if (*o_h) { c.h = h; c.grid_given = true; }
        if (*o_dt) { c.dt = dt; c.grid_given = true; }
        if (*o_method) c.method = method == "psor" ? LcpMethod::psor : LcpMethod::policy_iteration;
        if (*o_out) c.output_dir = output_dir;
        if (*o_format) c.format = format == "json" ? Format::json : Format::csv;
        if (*o_boundary) c.boundary = boundary;
        if (*o_report) c.report = report;
        if (*o_s) {
            c.s_values.clear();
            std::stringstream ss(s_list);
            std::string cell;
            while (std::getline(ss, cell, ',')) c.s_values.push_back(parse_complex(cell));
        }
        if (*o_steps) c.steps = steps;
        if (*o_expiry) c.expiry = expiry;
        if (*o_delta) c.delta = delta;
        if (*o_times) c.times = parse_list(times);
        if (*o_sweep) c.sweep_rho = parse_sweep(sweep);
        if (c.mode.empty()) throw Error(ErrorKind::invalid_params, "no subcommand given");
    } catch (const Error& e) {
        err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const json::exception& e) {
        err << "error (config): " << e.what() << "\n";
        return kExitInvalid;
    }
    return run(c, out, err);
}

}  // namespace amput::cli
