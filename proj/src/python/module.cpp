#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "obstlab/construct.hpp"
#include "obstlab/diagnostics.hpp"
#include "obstlab/error.hpp"
#include "obstlab/io.hpp"
#include "obstlab/presets.hpp"
#include "obstlab/solver.hpp"

namespace py = pybind11;
using namespace obstlab;
using io::json;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

PotentialMethod method_of(const std::string& m)
{
    if (m == "closed-form") return PotentialMethod::ClosedForm;
    if (m == "sequence") return PotentialMethod::SequenceExtrapolation;
    throw Error(ErrorKind::InvalidInput, "method must be closed-form or sequence", {{"value", m}});
}

std::shared_ptr<const GridSolution> solve_preset(const ParaboloidSolution& s, double h, double shift, bool auto_omega)
{
    SolveOptions o;
    o.auto_omega = auto_omega;
    return std::make_shared<const GridSolution>(
        solve_obstacle(s.dim(), boundary_from_field(paraboloid_field(s.shifted(shift))),
                       presets::solve_box(s.paraboloid(), h, shift), o));
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "obstlab core bindings";

    static py::exception<Error> exc(m, "ObstlabError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, e.to_json().dump().c_str());
        }
    });

    m.def("newton_constant", &newton_constant, py::arg("N"));

    py::class_<Ellipsoid>(m, "Ellipsoid")
        .def(py::init<Vec, Vec>(), py::arg("semiaxes"), py::arg("center"))
        .def(py::init<Vec>(), py::arg("semiaxes"))
        .def_static("ball", &Ellipsoid::ball, py::arg("dim"), py::arg("radius"))
        .def_property_readonly("dim", &Ellipsoid::dim)
        .def_property_readonly("semiaxes", &Ellipsoid::semiaxes)
        .def_property_readonly("center", &Ellipsoid::center)
        .def("contains", &Ellipsoid::contains)
        .def("potential", [](const Ellipsoid& E, const Vec& x) { return ellipsoid_potential(E, x); })
        .def("gradient", [](const Ellipsoid& E, const Vec& x) { return ellipsoid_potential_gradient(E, x); })
        .def("interior_coefficients",
             [](const Ellipsoid& E) {
                 const InteriorQuadratic q = ellipsoid_interior_coefficients(E);
                 return py::make_tuple(q.q, q.c);
             })
        .def("homoeoid_gap", [](const Ellipsoid& E, double t, const Vec& x) { return homoeoid_gap(E, t, x); })
        .def("to_dict", [](const Ellipsoid& E) { return to_py(io::to_json(E)); });

    py::class_<Paraboloid>(m, "Paraboloid")
        .def(py::init<Vec, double>(), py::arg("sectional_semiaxes"), py::arg("vertex_shift"))
        .def_property_readonly("dim", &Paraboloid::dim)
        .def_property_readonly("sectional_semiaxes", &Paraboloid::sectional_semiaxes)
        .def_property_readonly("vertex_shift", &Paraboloid::vertex_shift)
        .def("contains", &Paraboloid::contains)
        .def("isotropic", &Paraboloid::isotropic, py::arg("tol") = 1e-14)
        .def(
            "potential",
            [](const Paraboloid& P, const Vec& x, const std::string& method, double tol) {
                return to_py(io::to_json(PotentialEvaluator::paraboloid(P, method_of(method), tol).evaluate(x)));
            },
            py::arg("x"), py::arg("method") = "closed-form", py::arg("tol") = 1e-8)
        .def(
            "potential_montecarlo",
            [](const Paraboloid& P, const Vec& x, long samples, std::uint64_t seed, double tol) {
                const SlabResult r = paraboloid_montecarlo(P, x, samples, seed, tol);
                return py::dict(py::arg("potential") = r.estimate, py::arg("stderr") = r.stderr_,
                                py::arg("tail_bound") = r.tail_bound);
            },
            py::arg("x"), py::arg("samples"), py::arg("seed"), py::arg("tol") = 1e-6)
        .def("to_dict", [](const Paraboloid& P) { return to_py(io::to_json(P)); });

    py::class_<BlowdownData>(m, "Blowdown")
        .def(py::init([](Vec b, double bN, double bN1) {
                 BlowdownData d;
                 d.dim = static_cast<int>(b.size()) + 1;
                 d.b = std::move(b);
                 d.bN = bN;
                 d.bN1 = bN1;
                 d.validate();
                 return d;
             }),
             py::arg("b"), py::arg("bN"), py::arg("bN1") = 0.0)
        .def_static("preset", &presets::blowdown, py::arg("name"), py::arg("N") = 6)
        .def_readonly("dim", &BlowdownData::dim)
        .def_readonly("b", &BlowdownData::b)
        .def_readonly("bN", &BlowdownData::bN)
        .def_readonly("bN1", &BlowdownData::bN1)
        .def("to_dict", [](const BlowdownData& b) { return to_py(io::to_json(b)); });

    py::class_<ParaboloidSolution>(m, "ParaboloidSolution")
        .def_property_readonly("dim", &ParaboloidSolution::dim)
        .def_property_readonly("paraboloid", &ParaboloidSolution::paraboloid)
        .def_property_readonly("blowdown", &ParaboloidSolution::blowdown)
        .def_property_readonly("c_P", &ParaboloidSolution::c_P)
        .def("value", &ParaboloidSolution::value)
        .def("gradient", &ParaboloidSolution::gradient)
        .def("hessian", &ParaboloidSolution::hessian)
        .def("shifted", &ParaboloidSolution::shifted, py::arg("lam"));

    m.def(
        "construct",
        [](const BlowdownData& b, bool report) {
            ConstructOptions o;
            o.run_sequence = report;
            ConstructionReport rep;
            ParaboloidSolution s = construct_paraboloid(b, o, report ? &rep : nullptr);
            return py::make_tuple(s, report ? to_py(io::to_json(rep)) : py::none());
        },
        py::arg("blowdown"), py::arg("report") = false);

    py::class_<GridSolution, std::shared_ptr<GridSolution>>(m, "GridSolution")
        .def_readonly("dim", &GridSolution::dim)
        .def_property_readonly("nr", [](const GridSolution& s) { return s.grid.nr; })
        .def_property_readonly("nz", [](const GridSolution& s) { return s.grid.nz; })
        .def_property_readonly("rho", [](const GridSolution& s) {
            py::array_t<double> a(s.grid.nr);
            for (int i = 0; i < s.grid.nr; ++i) a.mutable_at(i) = s.rho(i);
            return a;
        })
        .def_property_readonly("z", [](const GridSolution& s) {
            py::array_t<double> a(s.grid.nz);
            for (int j = 0; j < s.grid.nz; ++j) a.mutable_at(j) = s.z(j);
            return a;
        })
        .def_property_readonly("u", [](const GridSolution& s) {
            py::array_t<double> a({s.grid.nz, s.grid.nr});
            std::copy(s.u.begin(), s.u.end(), a.mutable_data());
            return a;
        })
        .def("interpolate", &GridSolution::interpolate, py::arg("rho"), py::arg("z"))
        .def("complementarity_residual", &GridSolution::complementarity_residual)
        .def_property_readonly("sweeps", [](const GridSolution& s) { return s.stats.sweeps; })
        .def("metadata", [](const GridSolution& s) { return to_py(io::grid_metadata(s)); });

    m.def(
        "solve",
        [](int N, const std::function<double(double, double)>& bc, double R, double z0, double z1, double h,
           double omega) {
            SolveOptions o;
            o.auto_omega = omega <= 0;
            if (omega > 0) o.omega = omega;
            // sample the boundary once so the solve runs without the interpreter
            const GridSpec g = GridSpec::from_spacing(R, z0, z1, h);
            std::vector<double> table(std::size_t(g.nr) * g.nz);
            for (int j = 0; j < g.nz; ++j)
                for (int i = 0; i < g.nr; ++i) table[std::size_t(j) * g.nr + i] = bc(i * g.hr(), z0 + j * g.hz());
            const BoundaryData cached = [&table, &g, z0](double rho, double z) {
                const int i = static_cast<int>(std::lround(rho / g.hr()));
                const int j = static_cast<int>(std::lround((z - z0) / g.hz()));
                return table[std::size_t(j) * g.nr + i];
            };
            py::gil_scoped_release release;
            return std::make_shared<GridSolution>(solve_obstacle(N, cached, g, o));
        },
        py::arg("N"), py::arg("boundary"), py::arg("R"), py::arg("z0"), py::arg("z1"), py::arg("h"),
        py::arg("omega") = 0.0);

    m.def(
        "solve_paraboloid",
        [](const ParaboloidSolution& s, double h, double shift) {
            py::gil_scoped_release release;
            return std::const_pointer_cast<GridSolution>(solve_preset(s, h, shift, true));
        },
        py::arg("solution"), py::arg("h"), py::arg("shift") = 0.0);

    m.def(
        "frequency",
        [](const ParaboloidSolution& s, const std::vector<double>& radii) {
            FrequencyReport r;
            {
                py::gil_scoped_release release;
                r = frequency_report(paraboloid_field(s), blowdown_field(s.blowdown()), radii);
            }
            return to_py(io::to_json(r));
        },
        py::arg("solution"), py::arg("radii"));

    m.def(
        "acf",
        [](const ParaboloidSolution& s, int direction, double r) {
            Vec e = Vec::Zero(s.dim());
            e(direction) = 1.0;
            return to_py(io::to_json(acf(directional_derivative(paraboloid_field(s), e), r, Vec::Zero(s.dim()),
                                         acf_options(s.dim(), direction))));
        },
        py::arg("solution"), py::arg("direction"), py::arg("r"));

    m.def(
        "decay_scan",
        [](const Paraboloid& P, double mu, const std::vector<double>& ks) {
            return to_py(io::to_json(potential_decay_scan(P, P.enclosing_gamma(), mu, ks)));
        },
        py::arg("paraboloid"), py::arg("mu"), py::arg("ks"));

    m.def(
        "compare_and_slide",
        [](const ParaboloidSolution& s, double h, double Lambda) {
            const auto u = solve_preset(s, h, Lambda, true);
            const ParaboloidSolution sh = s.shifted(Lambda);
            Expansion e;
            e.l = Vec::Zero(s.dim());
            e.l(s.dim() - 1) = -s.blowdown().bN;
            e.c = sh.c_P();
            e.c_P = s.c_P();
            CompareOptions o;
            o.strict = false;
            return to_py(io::to_json(compare_and_slide(*u, s.blowdown(), e, s.paraboloid(), o)));
        },
        py::arg("solution"), py::arg("h"), py::arg("Lambda"));

    m.def(
        "hele_shaw",
        [](const ParaboloidSolution& s, double c, int n) {
            return to_py(io::to_json(hele_shaw_residual(s, c, presets::hele_shaw_bumps(s.paraboloid()), n)));
        },
        py::arg("solution"), py::arg("c") = 1.0, py::arg("n") = 8);
}
