#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptzcov/control.hpp"
#include "ptzcov/diagnostics.hpp"
#include "ptzcov/objective.hpp"
#include "ptzcov/output.hpp"
#include "ptzcov/partition.hpp"
#include "ptzcov/runner.hpp"
#include "ptzcov/scenario.hpp"
#include "ptzcov/sensing.hpp"

namespace py = pybind11;
using namespace ptzcov;

namespace {

using PointT = std::pair<double, double>;

geom2d::ConvexPolygon to_polygon(const std::vector<PointT>& vertices) {
    geom2d::Ring ring;
    for (const auto& [x, y] : vertices) ring.push_back({x, y});
    return geom2d::ConvexPolygon(std::move(ring));
}

py::dict ellipse_dict(const geom2d::Ellipse& e) {
    py::dict d;
    d["center"] = PointT{e.center.x, e.center.y};
    d["semi_major"] = e.semi_major;
    d["semi_minor"] = e.semi_minor;
    d["orientation"] = e.orientation;
    return d;
}

sim::Mode parse_mode(const std::string& m) {
    if (m == "ptz") return sim::Mode::PTZ;
    if (m == "fixed") return sim::Mode::FixedCamera;
    throw sim::ScenarioError("mode: expected 'ptz' or 'fixed'");
}

sim::Overrides make_overrides(std::optional<double> dt, std::optional<int> steps, std::optional<int> polygonization,
                              std::optional<int> boundary_samples, std::optional<std::uint64_t> seed,
                              std::optional<std::string> mode) {
    sim::Overrides ov;
    ov.dt = dt;
    ov.steps = steps;
    ov.polygonization = polygonization;
    ov.boundary_samples = boundary_samples;
    ov.seed = seed;
    if (mode) ov.mode = parse_mode(*mode);
    return ov;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coverage control for aerial PTZ camera teams";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<sim::ScenarioError>(m, "ScenarioError", error.ptr());

    py::class_<sensing::AgentState>(m, "AgentState")
        .def(py::init([](double x, double y, double z, double theta, double h, double delta, double r) {
                 sensing::AgentState s;
                 s.q = {x, y};
                 s.z = z;
                 s.theta = theta;
                 s.h = h;
                 s.delta = delta;
                 s.r = r;
                 return s;
             }),
             py::arg("x") = 0.0, py::arg("y") = 0.0, py::arg("z") = 1.0, py::arg("theta") = 0.0, py::arg("h") = 0.0,
             py::arg("delta") = 0.0, py::arg("r") = 0.0)
        .def_property(
            "x", [](const sensing::AgentState& s) { return s.q.x; }, [](sensing::AgentState& s, double v) { s.q.x = v; })
        .def_property(
            "y", [](const sensing::AgentState& s) { return s.q.y; }, [](sensing::AgentState& s, double v) { s.q.y = v; })
        .def_readwrite("z", &sensing::AgentState::z)
        .def_readwrite("theta", &sensing::AgentState::theta)
        .def_readwrite("h", &sensing::AgentState::h)
        .def_readwrite("delta", &sensing::AgentState::delta)
        .def_readwrite("r", &sensing::AgentState::r)
        .def("__repr__", [](const sensing::AgentState& s) {
            return py::str("AgentState(x={}, y={}, z={}, theta={}, h={}, delta={}, r={})")
                .format(s.q.x, s.q.y, s.z, s.theta, s.h, s.delta, s.r);
        });

    py::class_<sensing::AgentLimits>(m, "AgentLimits")
        .def(py::init([](double z_min, double z_max, double delta_min, double delta_max, double r,
                         std::optional<double> h_max) {
                 return sensing::AgentLimits::make(z_min, z_max, delta_min, delta_max, r, h_max);
             }),
             py::arg("z_min"), py::arg("z_max"), py::arg("delta_min"), py::arg("delta_max"), py::arg("r"),
             py::arg("h_max") = py::none())
        .def_readonly("z_min", &sensing::AgentLimits::z_min)
        .def_readonly("z_max", &sensing::AgentLimits::z_max)
        .def_readonly("delta_min", &sensing::AgentLimits::delta_min)
        .def_readonly("delta_max", &sensing::AgentLimits::delta_max)
        .def_readonly("h_max", &sensing::AgentLimits::h_max)
        .def_readonly("r", &sensing::AgentLimits::r)
        .def("validate", &sensing::AgentLimits::validate)
        .def("admits", &sensing::AgentLimits::admits, py::arg("state"), py::arg("tol") = 1e-12);

    py::class_<control::Gains>(m, "Gains")
        .def(py::init([](double q, double z, double theta, double h, double delta) {
                 control::Gains g{q, z, theta, h, delta};
                 g.validate();
                 return g;
             }),
             py::arg("q") = 1.0, py::arg("z") = 1.0, py::arg("theta") = 1.0, py::arg("h") = 1.0,
             py::arg("delta") = 1.0)
        .def_readonly("q", &control::Gains::q)
        .def_readonly("z", &control::Gains::z)
        .def_readonly("theta", &control::Gains::theta)
        .def_readonly("h", &control::Gains::h)
        .def_readonly("delta", &control::Gains::delta);

    py::class_<control::ControlInput>(m, "ControlInput")
        .def_property_readonly("u_q", [](const control::ControlInput& u) { return PointT{u.u_q.x, u.u_q.y}; })
        .def_readonly("u_z", &control::ControlInput::u_z)
        .def_readonly("u_theta", &control::ControlInput::u_theta)
        .def_readonly("u_h", &control::ControlInput::u_h)
        .def_readonly("u_delta", &control::ControlInput::u_delta)
        .def("norm", &control::ControlInput::norm);

    // Sensing geometry.
    m.def(
        "pattern_shape",
        [](double z, double h, double delta) {
            const auto s = sensing::pattern_shape(z, h, delta);
            return py::make_tuple(s.a, s.b, s.offset);
        },
        py::arg("z"), py::arg("h"), py::arg("delta"), "Semi-axes (a, b) and center offset of the sensing pattern.");
    m.def(
        "sensing_pattern", [](const sensing::AgentState& s) { return ellipse_dict(sensing::sensing_pattern(s)); },
        py::arg("state"));
    m.def(
        "guaranteed_region",
        [](const sensing::AgentState& s) -> py::object {
            const auto e = sensing::guaranteed_region(s);
            if (!e) return py::none();
            return ellipse_dict(*e);
        },
        py::arg("state"));
    m.def(
        "quality", [](const sensing::AgentState& s, const sensing::AgentLimits& l) { return sensing::quality(s, l).f; },
        py::arg("state"), py::arg("limits"));

    // Objective, partition and control on a convex workspace with uniform density.
    m.def(
        "objective",
        [](const std::vector<sensing::AgentState>& states, const std::vector<sensing::AgentLimits>& lims,
           const std::vector<PointT>& omega, int polygonization, double density) {
            const auto poly = to_polygon(omega);
            const auto p = partition::compute_partition(states, lims, poly, {polygonization, 1e-9});
            const auto r = objective::objective_from_partition(p, p.qualities, geom2d::DensityField::uniform(density));
            py::dict d;
            d["H"] = r.H;
            d["per_agent"] = r.per_agent;
            d["per_common"] = r.per_common;
            d["neutral_area"] = r.neutral_area;
            d["tiling_defect"] = partition::tiling_defect(p, poly);
            return d;
        },
        py::arg("states"), py::arg("limits"), py::arg("omega"), py::arg("polygonization") = 128,
        py::arg("density") = 1.0);
    m.def(
        "objective_oracle",
        [](const std::vector<sensing::AgentState>& states, const std::vector<sensing::AgentLimits>& lims,
           const std::vector<PointT>& omega, int resolution, double density) {
            return objective::objective_grid_oracle(states, lims, to_polygon(omega),
                                                    geom2d::DensityField::uniform(density), resolution);
        },
        py::arg("states"), py::arg("limits"), py::arg("omega"), py::arg("resolution") = 512, py::arg("density") = 1.0);
    m.def(
        "control_inputs",
        [](const std::vector<sensing::AgentState>& states, const std::vector<sensing::AgentLimits>& lims,
           const std::vector<PointT>& omega, const control::Gains& gains, int polygonization, int boundary_samples) {
            const auto poly = to_polygon(omega);
            const auto phi = geom2d::DensityField::uniform(1.0);
            const auto p = partition::compute_partition(states, lims, poly, {polygonization, 1e-9});
            const control::Snapshot snap{states, lims, &poly, &phi, 1e-9};
            std::vector<control::ControlInput> out;
            for (int i = 0; i < static_cast<int>(states.size()); ++i) {
                out.push_back(control::control_input(i, snap, p, gains, {boundary_samples}));
            }
            return out;
        },
        py::arg("states"), py::arg("limits"), py::arg("omega"), py::arg("gains") = control::Gains{},
        py::arg("polygonization") = 128, py::arg("boundary_samples") = 360);
    m.def(
        "check_gradients",
        [](const std::vector<sensing::AgentState>& states, const std::vector<sensing::AgentLimits>& lims,
           const std::vector<PointT>& omega, int resolution, double fd_step) {
            sim::GradientCheckOptions opts;
            opts.oracle_resolution = resolution;
            opts.fd_step = fd_step;
            py::list out;
            for (const auto& e : sim::check_gradients(states, lims, to_polygon(omega),
                                                      geom2d::DensityField::uniform(1.0), opts)) {
                py::dict d;
                d["agent"] = e.agent;
                d["component"] = sim::to_string(e.component);
                d["analytic"] = e.analytic;
                d["finite_difference"] = e.finite_difference;
                d["pass"] = e.pass;
                out.append(d);
            }
            return out;
        },
        py::arg("states"), py::arg("limits"), py::arg("omega"), py::arg("resolution") = 1024,
        py::arg("fd_step") = 1e-4);

    // Scenarios and simulation.
    py::class_<sim::Scenario>(m, "Scenario")
        .def_readonly("name", &sim::Scenario::name)
        .def_readonly("dt", &sim::Scenario::dt)
        .def_readonly("steps", &sim::Scenario::steps)
        .def_readonly("polygonization", &sim::Scenario::polygonization)
        .def_readonly("boundary_samples", &sim::Scenario::boundary_samples)
        .def_readonly("seed", &sim::Scenario::seed)
        .def_readonly("gains", &sim::Scenario::gains)
        .def_property_readonly("mode", [](const sim::Scenario& s) { return std::string(sim::to_string(s.mode)); })
        .def_property_readonly("omega",
                               [](const sim::Scenario& s) {
                                   std::vector<PointT> v;
                                   for (const auto& p : s.omega.vertices()) v.emplace_back(p.x, p.y);
                                   return v;
                               })
        .def("initial_states", &sim::Scenario::initial_states)
        .def("limits", &sim::Scenario::limits);

    m.def(
        "load_scenario",
        [](const std::string& path, std::optional<double> dt, std::optional<int> steps,
           std::optional<int> polygonization, std::optional<int> boundary_samples, std::optional<std::uint64_t> seed,
           std::optional<std::string> mode) {
            return sim::load_scenario(path, make_overrides(dt, steps, polygonization, boundary_samples, seed, mode));
        },
        py::arg("path"), py::kw_only(), py::arg("dt") = py::none(), py::arg("steps") = py::none(),
        py::arg("polygonization") = py::none(), py::arg("boundary_samples") = py::none(),
        py::arg("seed") = py::none(), py::arg("mode") = py::none());
    m.def(
        "parse_scenario",
        [](const std::string& text, std::optional<double> dt, std::optional<int> steps,
           std::optional<int> polygonization, std::optional<int> boundary_samples, std::optional<std::uint64_t> seed,
           std::optional<std::string> mode) {
            return sim::parse_scenario(text, ".",
                                       make_overrides(dt, steps, polygonization, boundary_samples, seed, mode));
        },
        py::arg("text"), py::kw_only(), py::arg("dt") = py::none(), py::arg("steps") = py::none(),
        py::arg("polygonization") = py::none(), py::arg("boundary_samples") = py::none(),
        py::arg("seed") = py::none(), py::arg("mode") = py::none());

    py::class_<sim::RunLog>(m, "RunLog")
        .def_readonly("converged", &sim::RunLog::converged)
        .def_readonly("monotonicity_violations", &sim::RunLog::monotonicity_violations)
        .def_readonly("warnings", &sim::RunLog::warnings)
        .def_property_readonly("H",
                               [](const sim::RunLog& log) {
                                   std::vector<double> h;
                                   for (const auto& r : log.records) h.push_back(r.report.H);
                                   return h;
                               })
        .def_property_readonly("max_control_norm",
                               [](const sim::RunLog& log) {
                                   std::vector<double> v;
                                   for (const auto& r : log.records) v.push_back(r.max_control_norm);
                                   return v;
                               })
        .def("states", [](const sim::RunLog& log, int step) { return log.records.at(step).states; }, py::arg("step"))
        .def_property_readonly("final_states", [](const sim::RunLog& log) { return log.records.back().states; })
        .def("write_outputs", [](const sim::RunLog& log, const std::string& dir) { sim::emit_outputs(log, dir); },
             py::arg("dir"));

    m.def("run", &sim::run, py::arg("scenario"), py::call_guard<py::gil_scoped_release>());
}
