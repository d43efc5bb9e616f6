#include "amput/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "amput/error.hpp"

namespace amput {

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw Error(ErrorKind::io_error, "write failed: " + path.string());
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

double parse_double(const std::string& s, const fs::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw Error(ErrorKind::io_error, "bad number '" + s + "' in " + path.string());
    return v;
}

}  // namespace

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_boundary_csv(const fs::path& path, const BoundaryCurve& c) {
    auto out = open_out(path);
    out << "t,phi,varphi,dphi\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        out << fmt_double(c.t[i]) << ',' << fmt_double(c.phi[i]) << ',' << fmt_double(c.varphi[i]) << ','
            << fmt_double(c.dphi[i]) << '\n';
    }
    close_out(out, path);
}

BoundaryCurve read_boundary_csv(const fs::path& path, const CanonicalParams& p) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,phi,varphi,dphi", 0) != 0) {
        throw Error(ErrorKind::io_error, "missing boundary header in " + path.string());
    }
    BoundaryCurve c;
    c.params = p;
    c.mu = mu(p);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split(line);
        if (cells.size() < 4) throw Error(ErrorKind::io_error, "short row in " + path.string());
        c.t.push_back(parse_double(cells[0], path));
        c.phi.push_back(parse_double(cells[1], path));
        c.varphi.push_back(parse_double(cells[2], path));
        c.dphi.push_back(parse_double(cells[3], path));
    }
    if (c.t.empty()) throw Error(ErrorKind::io_error, "no rows in " + path.string());
    return c;
}

void write_lattice_csv(const fs::path& path, const LatticeBoundary& lb, const MarketParams& m) {
    const BoundaryCurve c = lattice_boundary_to_canonical(lb, m);
    auto out = open_out(path);
    out << "t,s_star,x_canonical\n";
    for (std::size_t i = 0; i < lb.t.size(); ++i) {
        out << fmt_double(lb.t[i]) << ',' << fmt_double(lb.s_star[i]) << ',' << fmt_double(c.phi[i]) << '\n';
    }
    close_out(out, path);
}

void write_residual_table(const fs::path& path, const std::vector<BalayageResidual>& rows) {
    auto out = open_out(path);
    out << "re_s,im_s,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,tail_estimate\n";
    for (const auto& r : rows) {
        out << fmt_double(r.s.real()) << ',' << fmt_double(r.s.imag()) << ',' << fmt_double(r.lhs.real()) << ','
            << fmt_double(r.lhs.imag()) << ',' << fmt_double(r.rhs.real()) << ',' << fmt_double(r.rhs.imag()) << ','
            << fmt_double(r.abs_err) << ',' << fmt_double(r.rel_err) << ',' << fmt_double(r.tail_estimate) << '\n';
    }
    close_out(out, path);
}

json to_json(const AsymptoticReport& r) {
    return json{{"mu", r.mu},
                {"eta", r.eta},
                {"moment_v1", r.moment_v1},
                {"B1", r.B1},
                {"lambda0", r.lambda0},
                {"beta1", r.beta1},
                {"beta1_intro", r.beta1_intro},
                {"beta1_parts", r.beta1_parts},
                {"tail_fit", r.tail_fit},
                {"consistency", r.consistency}};
}

json to_json(const CanonicalParams& p) {
    json j{{"rho", p.rho}, {"theta", p.theta}};
    if (p.alpha) j["alpha"] = *p.alpha;
    return j;
}

json to_json(const GridSpec& g) {
    return json{{"t_max", g.t_max},   {"nt", g.nt},       {"x_left", g.x_left}, {"x_right", g.x_right},
                {"nx", g.nx},         {"h", g.h()},       {"dt", g.dt()},
                {"method", g.method == LcpMethod::psor ? "psor" : "policy_iteration"}};
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_params, "malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) {
    write_text(path, doc.dump(2) + "\n");
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    close_out(out, path);
}

}  // namespace amput
