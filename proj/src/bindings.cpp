// Python bindings: a thin layer over the scenario runner and the basic
// geometric operations, enough for scripting and smoke tests.

#include "fermat/scenario.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;

namespace {

fermat::SplittingChart chart_from(const std::string& name,
                                  const std::map<std::string, double>& params) {
    return fermat::catalog(name, params);
}

fermat::Vec to_vec(const std::vector<double>& v) {
    fermat::Vec out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<int>(i)) = v[i];
    return out;
}

std::vector<double> from_vec(const fermat::Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "future-pointing lightlike connecting rays via arrival-time shortening";

    m.def("catalog_names", &fermat::catalog_names, "Names of the built-in charts.");

    m.def(
        "run_scenario",
        [](const std::string& scenario_json) {
            const fermat::Scenario sc = fermat::parse_scenario(scenario_json);
            return fermat::report_json(fermat::run(sc));
        },
        py::arg("scenario_json"),
        "Run a scenario given as a JSON string; returns the report as JSON.");

    m.def(
        "run_scenario_file",
        [](const std::string& path, const std::string& out_dir) {
            const fermat::Scenario sc = fermat::load_scenario(path);
            const fermat::RunReport report = fermat::run(sc);
            fermat::emit_outputs(report, out_dir);
            return fermat::report_json(report);
        },
        py::arg("path"), py::arg("out_dir"),
        "Run a scenario file and write the report files; returns the report as JSON.");

    m.def(
        "scenario_hash",
        [](const std::string& scenario_json) {
            return fermat::scenario_hash(fermat::parse_scenario(scenario_json));
        },
        py::arg("scenario_json"), "Content hash of a scenario's canonical form.");

    m.def(
        "arrival_time",
        [](const std::string& chart_name, const std::map<std::string, double>& params,
           const std::vector<std::vector<double>>& knots, double t0) {
            const fermat::SplittingChart chart = chart_from(chart_name, params);
            fermat::SpatialPolyline path;
            for (const auto& k : knots)
                path.knots.push_back(to_vec(k));
            const fermat::LiftResult r = fermat::lift_time(chart, path, t0);
            if (r.left_domain)
                throw fermat::Error(fermat::ErrorCode::OutOfDomain,
                                    "lifted path leaves the chart domain", r.exit_s);
            return r.curve.arrival_time();
        },
        py::arg("chart"), py::arg("params"), py::arg("knots"), py::arg("t0") = 0.0,
        "Arrival time of the future lightlike lift of a spatial polyline.");

    m.def(
        "trace_ray",
        [](const std::string& chart_name, const std::map<std::string, double>& params,
           const std::vector<double>& x0, double t0, const std::vector<double>& direction,
           double length, double rk_step) {
            const fermat::SplittingChart chart = chart_from(chart_name, params);
            const fermat::Event z0(to_vec(x0), t0);
            const fermat::Vec v0 = fermat::null_velocity(chart, z0, to_vec(direction));
            const fermat::GeodesicRecord rec =
                fermat::integrate_null_geodesic(chart, z0, v0, length, rk_step);
            py::dict out;
            std::vector<double> s = rec.s;
            std::vector<std::vector<double>> z, v;
            for (int i = 0; i < rec.samples(); ++i) {
                z.push_back(from_vec(rec.z[i].coords()));
                v.push_back(from_vec(rec.v[i]));
            }
            out["s"] = s;
            out["z"] = z;
            out["v"] = v;
            out["left_domain"] = rec.left_domain;
            return out;
        },
        py::arg("chart"), py::arg("params"), py::arg("x0"), py::arg("t0"),
        py::arg("direction"), py::arg("length") = 1.0, py::arg("rk_step") = 1e-3,
        "Integrate a lightlike geodesic from (x0, t0) along a spatial direction.");

    py::register_exception<fermat::Error>(m, "FermatError");
}
