#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "amput/asymptotics.hpp"
#include "amput/balayage.hpp"
#include "amput/canonical.hpp"
#include "amput/error.hpp"
#include "amput/io.hpp"
#include "amput/lattice.hpp"
#include "amput/obstacle.hpp"

namespace py = pybind11;
using namespace amput;

namespace {

LcpMethod parse_method(const std::string& m) {
    if (m == "policy") return LcpMethod::policy_iteration;
    if (m == "psor") return LcpMethod::psor;
    throw Error(ErrorKind::invalid_params, "method must be 'policy' or 'psor'");
}

py::dict residual_dict(const BalayageResidual& r) {
    py::dict d;
    d["s"] = r.s;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["abs_err"] = r.abs_err;
    d["rel_err"] = r.rel_err;
    d["tail_estimate"] = r.tail_estimate;
    return d;
}

}  // namespace

PYBIND11_MODULE(_amput, m) {
    m.doc() = "American put free boundary in canonical heat-equation coordinates";

    static py::exception<Error> no_convergence(m, "NoConvergence", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            switch (e.kind()) {
                case ErrorKind::no_convergence:
                case ErrorKind::degenerate_level:
                    py::set_error(no_convergence, e.what());
                    return;
                case ErrorKind::io_error:
                    PyErr_SetString(PyExc_OSError, e.what());
                    return;
                default:
                    PyErr_SetString(PyExc_ValueError, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
                    return;
            }
        }
    });

    py::class_<BoundaryCurve>(m, "Boundary")
        .def_readonly("t", &BoundaryCurve::t)
        .def_readonly("phi", &BoundaryCurve::phi)
        .def_readonly("varphi", &BoundaryCurve::varphi)
        .def_readonly("dphi", &BoundaryCurve::dphi)
        .def_readonly("phi_raw", &BoundaryCurve::phi_raw)
        .def_readonly("mu", &BoundaryCurve::mu)
        .def_property_readonly("rho", [](const BoundaryCurve& c) { return c.params.rho; })
        .def_property_readonly("theta", [](const BoundaryCurve& c) { return c.params.theta; })
        .def("__len__", &BoundaryCurve::size)
        .def("at", [](const BoundaryCurve& c, double t) { return boundary_at(c, t); }, py::arg("t"));

    m.def(
        "from_market",
        [](double r, double sigma) {
            const CanonicalParams p = from_market({r, sigma});
            py::dict d;
            d["rho"] = p.rho;
            d["theta"] = p.theta;
            d["alpha"] = *p.alpha;
            return d;
        },
        py::arg("r"), py::arg("sigma"));
    m.def("mu", [](double rho, double theta) { return mu({rho, theta, {}}); }, py::arg("rho") = 0.0,
          py::arg("theta") = 1.0);
    m.def("eta", [](double rho, double theta) { return eta({rho, theta, {}}); }, py::arg("rho") = 0.0,
          py::arg("theta") = 1.0);
    m.def("reward", [](double t, double x, double rho, double theta) { return reward_canonical(t, x, {rho, theta, {}}); },
          py::arg("t"), py::arg("x"), py::arg("rho") = 0.0, py::arg("theta") = 1.0);

    m.def(
        "solve",
        [](double rho, double theta, double t_max, double h, double dt, const std::string& method) {
            const CanonicalParams p{rho, theta, {}};
            GridSpec g = GridSpec::make(p, t_max, h, dt);
            g.method = parse_method(method);
            py::gil_scoped_release release;
            return extract_boundary(solve(p, g));
        },
        py::arg("rho") = 0.0, py::arg("theta") = 1.0, py::arg("t_max") = 8.0, py::arg("h") = 2.5e-3,
        py::arg("dt") = 5e-4, py::arg("method") = "policy");

    m.def("read_boundary_csv",
          [](const std::string& path, double rho, double theta) { return read_boundary_csv(path, {rho, theta, {}}); },
          py::arg("path"), py::arg("rho") = 0.0, py::arg("theta") = 1.0);
    m.def("write_boundary_csv", [](const std::string& path, const BoundaryCurve& c) { write_boundary_csv(path, c); },
          py::arg("path"), py::arg("boundary"));

    m.def("balayage_residual", [](const BoundaryCurve& c, cplx s) { return residual_dict(residual(c, s)); },
          py::arg("boundary"), py::arg("s"));
    m.def("balayage_rhs", [](cplx s, double rho, double theta) { return balayage_rhs(s, {rho, theta, {}}); },
          py::arg("s"), py::arg("rho") = 0.0, py::arg("theta") = 1.0);
    m.def(
        "flux_identity",
        [](const BoundaryCurve& c) {
            const FluxIdentity f = flux_identity(c);
            py::dict d;
            d["sum"] = f.sum;
            d["tail"] = f.tail;
            d["integral"] = f.integral;
            d["target"] = f.target;
            d["residual"] = f.residual;
            return d;
        },
        py::arg("boundary"));
    m.def(
        "phi_transform",
        [](const BoundaryCurve& c, cplx z, const std::string& mode) {
            if (mode != "direct" && mode != "continued") {
                throw Error(ErrorKind::invalid_params, "mode must be 'direct' or 'continued'");
            }
            return phi_transform(c, z, mode == "direct" ? PhiMode::direct : PhiMode::continued);
        },
        py::arg("boundary"), py::arg("z"), py::arg("mode") = "continued");
    m.def("taylor_remainder", &taylor_remainder, py::arg("z"), py::arg("n"));

    m.def("first_moment", [](double rho, double theta) { return first_moment_v1({rho, theta, {}}); },
          py::arg("rho") = 0.0, py::arg("theta") = 1.0);
    m.def("b1", [](double rho, double theta) { return b1({rho, theta, {}}); }, py::arg("rho") = 0.0,
          py::arg("theta") = 1.0);
    m.def(
        "report",
        [](const BoundaryCurve& c) {
            const AsymptoticReport r = make_report(c);
            py::dict d;
            d["mu"] = r.mu;
            d["eta"] = r.eta;
            d["moment_v1"] = r.moment_v1;
            d["B1"] = r.B1;
            d["lambda0"] = r.lambda0;
            d["beta1"] = r.beta1;
            d["beta1_intro"] = r.beta1_intro;
            d["beta1_parts"] = r.beta1_parts;
            d["tail_fit"] = r.tail_fit;
            d["consistency"] = r.consistency;
            return d;
        },
        py::arg("boundary"));
    m.def(
        "heat_extension",
        [](const std::function<double(double)>& f, double t, double x) {
            const HeatExtension h = heat_extension(f, t, x);
            return py::make_tuple(h.value, h.leading_term);
        },
        py::arg("f"), py::arg("t"), py::arg("x"));

    m.def(
        "lattice_price",
        [](double r, double sigma, double expiry, std::size_t steps, double s0) {
            return price_american_put({steps, expiry, {r, sigma}}, s0);
        },
        py::arg("r"), py::arg("sigma"), py::arg("expiry"), py::arg("steps") = 4000, py::arg("s0") = 1.0);
    m.def(
        "lattice_boundary",
        [](double r, double sigma, double expiry, std::size_t steps) {
            const MarketParams mk{r, sigma};
            LatticeBoundary lb;
            {
                py::gil_scoped_release release;
                lb = extract_lattice_boundary({steps, expiry, mk});
            }
            return lattice_boundary_to_canonical(lb, mk);
        },
        py::arg("r"), py::arg("sigma"), py::arg("expiry"), py::arg("steps") = 4000);
}
