#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "greens/direct1d.hpp"
#include "greens/errors.hpp"
#include "greens/experiments.hpp"
#include "greens/geometry.hpp"
#include "greens/gradient_series.hpp"
#include "greens/inverse1d.hpp"
#include "greens/radial3d.hpp"
#include "greens/stratified3d.hpp"

namespace py = pybind11;
using namespace greens;

namespace {

py::object cell(const Cell& c) {
    if (const double* v = std::get_if<double>(&c)) return py::float_(*v);
    return py::str(std::get<std::string>(c));
}

std::string dump(const ResultTable& t, TableFormat f) {
    std::ostringstream os;
    write_table(t, os, f);
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_greens, m) {
    m.doc() = "Green's functions of Schroedinger operators with Dirichlet walls";
    m.attr("__version__") = GREENS_VERSION;

    static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const NumericalError& e) {
            py::set_error(numerical, (std::string(e.kind()) + " in " + e.operation() + ": " + e.what()).c_str());
        }
    });
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def("sqrt_upper", &sqrt_upper, py::arg("z"));

    py::class_<Potential1D>(m, "Potential1D")
        .def_static("zero", &Potential1D::zero)
        .def_static("constant", &Potential1D::constant, py::arg("c"))
        .def_static("linear", &Potential1D::linear, py::arg("slope"), py::arg("offset") = 0.0)
        .def_static("harmonic", &Potential1D::harmonic, py::arg("k"), py::arg("center"))
        .def_static("gaussian", &Potential1D::gaussian, py::arg("a"), py::arg("center"), py::arg("width"))
        .def_static("bump", &Potential1D::bump, py::arg("a"), py::arg("width"))
        .def_static("polynomial", &Potential1D::polynomial, py::arg("coeffs"))
        .def_static("tabulated", &Potential1D::tabulated, py::arg("xs"), py::arg("ys"))
        .def("__call__", py::overload_cast<double>(&Potential1D::operator(), py::const_))
        .def("taylor", &Potential1D::taylor, py::arg("x_ref"), py::arg("n"))
        .def_property_readonly("name", &Potential1D::name)
        .def("__repr__", [](const Potential1D& u) { return "<Potential1D " + u.name() + ">"; });

    py::class_<DomainSpec>(m, "DomainSpec")
        .def_static("interval", &DomainSpec::interval, py::arg("X"))
        .def_static("half_line", &DomainSpec::half_line)
        .def_readonly("extent", &DomainSpec::extent)
        .def("__repr__", &DomainSpec::describe);

    m.def(
        "green_direct",
        [](const Potential1D& u, const DomainSpec& d, cplx z, double x, double xp) {
            return green_direct(u, d, ComplexEnergy(z), x, xp);
        },
        py::arg("u"), py::arg("domain"), py::arg("z"), py::arg("x"), py::arg("xp"));
    m.def(
        "free_halfline_green", [](cplx z, double x, double xp) { return free_halfline_green(ComplexEnergy(z), x, xp); },
        py::arg("z"), py::arg("x"), py::arg("xp"));

    py::class_<ProfileField>(m, "ProfileField")
        .def("n", &ProfileField::n, py::arg("x"))
        .def("dn", &ProfileField::dn, py::arg("x"))
        .def_property_readonly("c2", &ProfileField::c2)
        .def_readonly("residual", &ProfileField::residual)
        .def("green", [](const ProfileField& p, double x, double xp) { return offdiag_reconstruct(p, x, xp); });
    m.def(
        "solve_profile",
        [](const Potential1D& u, const DomainSpec& d, cplx z) { return solve_profile(u, d, ComplexEnergy(z)); },
        py::arg("u"), py::arg("domain"), py::arg("z"));

    m.def(
        "green3d_free_halfspace",
        [](cplx z, double x, double xp, double rho) { return green3d_free_halfspace(ComplexEnergy(z), x, xp, rho); },
        py::arg("z"), py::arg("x"), py::arg("xp"), py::arg("rho"));
    m.def(
        "center_c3", [](cplx z, int l) { return center_c3(ComplexEnergy(z), l); }, py::arg("z"), py::arg("l"));

    m.def("gradient_coefficients", [](int order) {
        const auto t = coefficient_table(direct_series(order, 3));
        py::dict d;
        d["lead"] = t.lead.str();
        d["laplacian"] = t.laplacian.str();
        d["grad_sq"] = t.grad_sq.str();
        d["bilaplacian"] = t.bilaplacian.str();
        d["complete"] = t.complete;
        return d;
    }, py::arg("order") = 7);
    m.def(
        "radial_k_integral", [](int q, int mm, cplx w) { return radial_k_integral(q, mm, w); }, py::arg("q"),
        py::arg("m"), py::arg("w"));

    py::class_<ImplicitSurface>(m, "ImplicitSurface")
        .def_static("sphere", &ImplicitSurface::sphere, py::arg("R"), py::arg("center") = Vec3{0.0, 0.0, 0.0})
        .def_static("cylinder", &ImplicitSurface::cylinder, py::arg("R"))
        .def_static("plane", &ImplicitSurface::plane, py::arg("n"), py::arg("c") = 0.0)
        .def_static("ellipsoid", &ImplicitSurface::ellipsoid, py::arg("a"), py::arg("b"), py::arg("c"))
        .def_static("scaled", &ImplicitSurface::scaled, py::arg("base"), py::arg("s"))
        .def_static("reparametrized", &ImplicitSurface::reparametrized, py::arg("base"), py::arg("L"))
        .def("__call__", &ImplicitSurface::operator())
        .def("gradient", &ImplicitSurface::gradient)
        .def_property_readonly("level", &ImplicitSurface::level)
        .def_property_readonly("name", &ImplicitSurface::name);
    m.def(
        "boundary_prediction",
        [](const ImplicitSurface& s, Vec3 r0, cplx z) {
            const auto p = boundary_prediction(s, r0, ComplexEnergy(z));
            py::dict d;
            d["c1"] = p.c1;
            d["d1"] = p.d1;
            d["d2"] = p.d2;
            d["tau_d2"] = p.tau_d2;
            d["curvature"] = p.curvature;
            d["xi0"] = p.xi0;
            return d;
        },
        py::arg("surface"), py::arg("r0"), py::arg("z"));

    py::class_<ResultTable>(m, "ResultTable")
        .def_property_readonly("name", &ResultTable::name)
        .def_property_readonly("columns",
                               [](const ResultTable& t) {
                                   py::list l;
                                   for (const auto& c : t.columns()) l.append(c.name);
                                   return l;
                               })
        .def_property_readonly("units",
                               [](const ResultTable& t) {
                                   py::list l;
                                   for (const auto& c : t.columns()) l.append(c.unit);
                                   return l;
                               })
        .def_property_readonly("rows",
                               [](const ResultTable& t) {
                                   py::list out;
                                   for (const auto& r : t.rows()) {
                                       py::list row;
                                       for (const auto& c : r) row.append(cell(c));
                                       out.append(row);
                                   }
                                   return out;
                               })
        .def_property_readonly("metadata", [](const ResultTable& t) { return t.metadata(); })
        .def("to_csv", [](const ResultTable& t) { return dump(t, TableFormat::csv); })
        .def("to_json", [](const ResultTable& t) { return dump(t, TableFormat::json); })
        .def_static("from_csv",
                    [](const std::string& s) {
                        std::istringstream is(s);
                        return read_table(is, TableFormat::csv);
                    })
        .def_static("from_json",
                    [](const std::string& s) {
                        std::istringstream is(s);
                        return read_table(is, TableFormat::json);
                    })
        .def("__eq__", &ResultTable::operator==);

    py::class_<Check>(m, "Check")
        .def_readonly("name", &Check::name)
        .def_readonly("value", &Check::value)
        .def_readonly("tol", &Check::tol)
        .def_readonly("passed", &Check::passed)
        .def("__repr__", [](const Check& c) {
            return "<Check " + c.name + (c.passed ? " pass" : " fail") + ">";
        });

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("scenario", &ExperimentResult::scenario)
        .def_readonly("tables", &ExperimentResult::tables)
        .def_readonly("checks", &ExperimentResult::checks)
        .def_property_readonly("passed", &ExperimentResult::passed)
        .def("summary", &ExperimentResult::summary)
        .def(
            "write", [](const ExperimentResult& r, const std::string& dir, const std::string& fmt) {
                write_result(r, dir, parse_format(fmt));
            },
            py::arg("dir"), py::arg("format") = "csv");

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readonly("kind", &Scenario::kind)
        .def_readonly("mode", &Scenario::mode)
        .def_readonly("z", &Scenario::z)
        .def_readonly("tolerances", &Scenario::tolerances)
        .def("hash", &Scenario::hash);
    m.def("parse_scenario", &parse_scenario, py::arg("text"), py::arg("origin") = "<string>");
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def(
        "run_scenario",
        [](const Scenario& s, double tol_scale) {
            py::gil_scoped_release release;
            return run_scenario(s, RunOptions{tol_scale});
        },
        py::arg("scenario"), py::arg("tol_scale") = 1.0);
}
