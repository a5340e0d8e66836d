#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "celab/lab.hpp"

namespace py = pybind11;
using namespace celab;

namespace {

SpherePoint point_from_obj(const py::object& obj) {
    if (obj.is_none()) return SpherePoint::infinity();
    if (py::isinstance<py::str>(obj)) {
        return parse_point(obj.cast<std::string>());
    }
    return SpherePoint(obj.cast<Complex>());
}

py::object point_to_obj(const SpherePoint& p) {
    if (p.is_inf()) return py::none();
    return py::cast(p.value());
}

Polynomial poly_from_list(const std::vector<Complex>& coeffs) {
    return Polynomial(std::vector<Complex>(coeffs));
}

} // namespace

PYBIND11_MODULE(_celab, m) {
    m.doc() = "Collet-Eckmann condition laboratory for rational maps (C++ core)";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

    py::class_<RationalMap>(m, "RationalMap")
        .def(py::init([](const std::vector<Complex>& num, const std::vector<Complex>& den) {
                 return RationalMap(poly_from_list(num), poly_from_list(den));
             }),
             py::arg("numerator"), py::arg("denominator") = std::vector<Complex>{{1.0, 0.0}})
        .def_property_readonly("degree", &RationalMap::degree)
        .def("__call__", [](const RationalMap& f, const py::object& z) {
            return point_to_obj(eval(f, point_from_obj(z)));
        });

    m.def("registry", []() {
        py::list out;
        for (const auto& e : registry()) {
            py::dict d;
            d["name"] = e.name;
            d["description"] = e.description;
            MapSpec spec = registry_map(e.name, std::nullopt);
            d["numerator"] = spec.numerator.coeffs();
            d["denominator"] = spec.denominator.coeffs();
            out.append(d);
        }
        return out;
    });

    m.def(
        "registry_map",
        [](const std::string& name, const py::object& param) {
            std::optional<Complex> p;
            if (!param.is_none()) p = param.cast<Complex>();
            MapSpec spec = registry_map(name, p);
            return RationalMap(spec.numerator, spec.denominator);
        },
        py::arg("name"), py::arg("param") = py::none());

    m.def(
        "chordal_dist",
        [](const py::object& a, const py::object& b) {
            return chordal_dist(point_from_obj(a), point_from_obj(b));
        },
        "Chordal distance on the sphere normalized to diameter 2 (None = infinity)");

    m.def("spherical_deriv", [](const RationalMap& f, const py::object& z) {
        return spherical_deriv(f, point_from_obj(z));
    });

    m.def("poly_roots", [](const std::vector<Complex>& coeffs) {
        py::list out;
        for (const auto& r : poly_roots(poly_from_list(coeffs)))
            out.append(py::make_tuple(r.value, r.multiplicity));
        return out;
    });

    m.def("preimages", [](const RationalMap& f, const py::object& z) {
        py::list out;
        for (const auto& [w, mult] : preimages(f, point_from_obj(z)))
            out.append(py::make_tuple(point_to_obj(w), mult));
        return out;
    });

    m.def(
        "critical_points",
        [](const RationalMap& f, int horizon) {
            auto cs = julia_classify(f, critical_points(f), horizon);
            py::list out;
            for (const auto& e : cs.entries) {
                py::dict d;
                d["point"] = point_to_obj(e.point);
                d["mu"] = e.mu;
                d["in_julia"] = e.in_julia;
                out.append(d);
            }
            return out;
        },
        py::arg("f"), py::arg("horizon") = 200);

    m.def(
        "ce_exponent",
        [](const RationalMap& f, const py::object& c, int n, int horizon) {
            auto cs = julia_classify(f, critical_points(f), horizon);
            auto est = ce_exponent(f, cs, point_from_obj(c), n);
            py::dict d;
            d["lambda1"] = est.lambda1;
            d["C1"] = est.C1;
            d["observed"] = est.observed;
            d["per_n_exponents"] = est.per_n_exponents;
            return d;
        },
        py::arg("f"), py::arg("c"), py::arg("n"), py::arg("horizon") = 200);

    m.def(
        "sr_distances",
        [](const RationalMap& f, const py::object& c, int n, int horizon) {
            auto cs = julia_classify(f, critical_points(f), horizon);
            return sr_distances(f, cs, point_from_obj(c), n).values;
        },
        py::arg("f"), py::arg("c"), py::arg("n"), py::arg("horizon") = 200);

    m.def(
        "ce2_min_derivative",
        [](const RationalMap& f, const py::object& c, int n, int horizon) {
            auto cs = julia_classify(f, critical_points(f), horizon);
            auto est = ce2_min_derivative(f, cs, point_from_obj(c), n);
            py::dict d;
            d["lambda2"] = est.lambda2;
            d["C2"] = est.C2;
            d["observed"] = est.observed;
            d["per_n_min"] = est.per_n_min;
            return d;
        },
        py::arg("f"), py::arg("c"), py::arg("n"), py::arg("horizon") = 200);

    m.def(
        "shrinking_schedule",
        [](int n) {
            auto s = shrinking_schedule(n);
            py::dict d;
            d["deltas"] = s.deltas;
            d["Deltas"] = s.Deltas;
            d["certified_lower_bound"] = s.certified_lower_bound();
            return d;
        },
        py::arg("n"));

    m.def(
        "lift_circle",
        [](const RationalMap& f, const py::object& center, double radius, const py::object& w,
           int n, int samples) {
            auto curve = lift_circle(f, ChordalDisk(point_from_obj(center), radius),
                                     point_from_obj(w), n, samples);
            py::dict d;
            py::list verts;
            for (const auto& v : curve.vertices) verts.append(point_to_obj(v));
            d["vertices"] = verts;
            d["loops"] = curve.loops;
            d["level"] = curve.level;
            d["diameter"] = curve_diameter(curve);
            return d;
        },
        py::arg("f"), py::arg("center"), py::arg("radius"), py::arg("w"), py::arg("n"),
        py::arg("samples") = 256);

    m.def(
        "lemma_constants",
        [](double epsilon, double alpha, int n, double lambda_exp, double sup_deriv) {
            auto lc = lemma_constants(epsilon, alpha, n, lambda_exp, sup_deriv);
            return py::make_tuple(lc.s, lc.M);
        },
        py::arg("epsilon"), py::arg("alpha"), py::arg("n"), py::arg("lambda_exp"),
        py::arg("sup_deriv"));

    m.def("sup_spherical_deriv", &sup_spherical_deriv, py::arg("f"),
          py::arg("samples") = 1000000);

    m.def(
        "run_equivalence_json",
        [](const std::string& config_json) {
            RunConfig cfg = parse_config(config_json);
            EquivalenceReport rep = run_equivalence(cfg);
            return report_to_json_string(rep, cfg);
        },
        py::arg("config_json"),
        "Run every estimator from a RunConfig JSON string; returns report JSON");

    m.attr("__version__") = "0.1.0";
}
