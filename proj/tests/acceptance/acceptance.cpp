// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ptzcov/control.hpp"
#include "ptzcov/diagnostics.hpp"
#include "ptzcov/objective.hpp"
#include "ptzcov/output.hpp"
#include "ptzcov/runner.hpp"
#include "support.hpp"

using namespace ptzcov;
using testing::kDeg;
using testing::Rng;

namespace {

const std::string kScenarios = PTZCOV_SCENARIO_DIR;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("criterion %d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct CaseRuns {
    std::string name;
    sim::Scenario scenario;
    sim::RunLog ptz;
    sim::RunLog fixed;
};

CaseRuns run_case(const std::string& name) {
    CaseRuns c;
    c.name = name;
    c.scenario = sim::load_scenario(kScenarios + "/" + name + ".yaml");
    c.ptz = sim::run(c.scenario);
    sim::Overrides ov;
    ov.mode = sim::Mode::FixedCamera;
    c.fixed = sim::run(sim::load_scenario(kScenarios + "/" + name + ".yaml", ov));
    return c;
}

std::string read(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Largest value of the support function of an ellipse minus the edge offset, over the
// edges of a convex polygon; <= 0 means the ellipse lies inside.
double containment_slack(const geom2d::Ellipse& e, const geom2d::ConvexPolygon& omega) {
    const auto& v = omega.vertices();
    const geom2d::Point u{std::cos(e.orientation), std::sin(e.orientation)};
    const geom2d::Point w{-u.y, u.x};
    double worst = -1e300;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const geom2d::Point a = v[k], b = v[(k + 1) % v.size()];
        const geom2d::Point edge = b - a;
        const geom2d::Point n = (1.0 / geom2d::norm(edge)) * geom2d::Point{edge.y, -edge.x};
        const double du = geom2d::dot(n, u), dw = geom2d::dot(n, w);
        const double support = geom2d::dot(n, e.center) +
                               std::sqrt(e.semi_major * e.semi_major * du * du + e.semi_minor * e.semi_minor * dw * dw);
        worst = std::max(worst, support - geom2d::dot(n, a));
    }
    return worst;
}

// Smallest quadratic form of ellipse `other` over dense samples of the boundary of `e`,
// together with the center test; > 1 means the two are disjoint.
double separation(const geom2d::Ellipse& e, const geom2d::Ellipse& other, int samples = 20000) {
    double m = std::min(other.quadratic_form(e.center), e.quadratic_form(other.center));
    for (int k = 0; k < samples; ++k) m = std::min(m, other.quadratic_form(e.point_at(2 * M_PI * k / samples)));
    return m;
}

void criterion_1(const std::vector<CaseRuns>& cases) {
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const double secs = c.ptz.records.back().wall_seconds;
        const int v = c.ptz.monotonicity_violations;
        ok = ok && v == 0 && secs < 60.0;
        detail += fmt("%s: %d violations, H %.6g -> %.6g, %.1f s; ", c.name.c_str(), v, c.ptz.records.front().report.H,
                      c.ptz.records.back().report.H, secs);
    }
    report(1, "monotone H", ok, detail);
}

void criterion_2() {
    Rng rng(2024);
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const auto phi = geom2d::DensityField::uniform(1.0);
    sim::GradientCheckOptions opts;
    opts.oracle_resolution = 1024;
    opts.fd_step = 1e-4;
    opts.rel_tol = 0.02;
    opts.abs_tol = 1e-4;

    int checked = 0, failed = 0;
    double worst_rel = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int n = rng.integer(1, 3);
        const auto states = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const control::Gains gains{rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2), rng.uniform(0.5, 2),
                                   rng.uniform(0.5, 2)};
        const double g[6] = {gains.q, gains.q, gains.z, gains.theta, gains.h, gains.delta};

        const auto part = partition::compute_partition(states, l, omega, {opts.polygonization, opts.eps_f});
        const control::Snapshot snap{states, l, &omega, &phi, opts.eps_f};
        const auto entries = sim::check_gradients(states, l, omega, phi, opts);
        for (const auto& e : entries) {
            // The control law's component divided by its gain is what gets compared.
            const auto u = control::control_input(e.agent, snap, part, gains, {opts.boundary_samples});
            const int ci = static_cast<int>(e.component);
            const double analytic = sim::component(u, e.component) / g[ci];
            const double err = std::abs(analytic - e.finite_difference);
            const bool pass = err <= opts.abs_tol || err <= opts.rel_tol * std::abs(e.finite_difference);
            ++checked;
            if (!pass) {
                ++failed;
                std::printf("  scenario %d agent %d %s: control/gain %.8g, finite difference %.8g\n", k, e.agent,
                            sim::to_string(e.component), analytic, e.finite_difference);
            }
            if (err > opts.abs_tol) worst_rel = std::max(worst_rel, err / std::abs(e.finite_difference));
        }
    }
    report(2, "gradient vs oracle", failed == 0,
           fmt("%d components, %d outside tolerance, worst relative error above the absolute floor %.3g", checked,
               failed, worst_rel));
}

void criterion_3() {
    Rng rng(3033);
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const auto phi = geom2d::DensityField::uniform(1.0);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
        const int n = rng.integer(1, 6);
        const auto states = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const auto p = partition::compute_partition(states, l, omega, {128, 1e-9});
        const double h = objective::objective_from_partition(p, p.qualities, phi).H;
        const double o = objective::objective_grid_oracle(states, l, omega, phi, 512);
        worst = std::max(worst, testing::rel_err(h, o));
    }
    report(3, "partition H vs oracle", worst <= 5e-3, fmt("50 scenarios, worst relative gap %.3g", worst));
}

void criterion_4(const CaseRuns& c) {
    const auto& last = c.ptz.records.back();
    const bool converged = c.ptz.converged && last.max_control_norm < 1e-4;
    std::vector<geom2d::Ellipse> g;
    bool all_present = true;
    for (const auto& s : last.states) {
        const auto e = sensing::guaranteed_region(s);
        all_present = all_present && e.has_value();
        if (e) g.push_back(*e);
    }
    double slack = -1e300, sep = 1e300;
    for (const auto& e : g) slack = std::max(slack, containment_slack(e, c.scenario.omega));
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (i != j) sep = std::min(sep, separation(g[i], g[j]));
        }
    }
    const bool ok = converged && all_present && slack <= 1e-9 && sep > 1.0;
    report(4, "case1 structure", ok,
           fmt("max control norm %.3g, worst containment slack %.3g, min cross quadratic form 1 + %.3g",
               last.max_control_norm, slack, sep - 1.0));
}

void criterion_5(const std::vector<CaseRuns>& cases) {
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const double p = c.ptz.records.back().report.H, f = c.fixed.records.back().report.H;
        ok = ok && p > f;
        detail += fmt("%s: PTZ %.6g vs fixed %.6g; ", c.name.c_str(), p, f);
    }
    report(5, "PTZ beats fixed camera", ok, detail);
}

void criterion_6() {
    Rng rng(6060);
    const auto lims = testing::test_limits();
    double worst = 0.0;
    bool exact = true;
    for (int k = 0; k < 200; ++k) {
        auto s = testing::random_state(rng, lims);
        s.h = 0.0;
        const auto shape = sensing::pattern_shape(s.z, 0.0, s.delta);
        const auto pat = sensing::sensing_pattern(s);
        const double want = s.z * std::tan(s.delta);
        worst = std::max({worst, std::abs(shape.a - want), std::abs(shape.b - want), std::abs(pat.semi_major - want),
                          std::abs(pat.semi_minor - want), geom2d::norm(pat.center - s.q)});

        auto t = testing::random_state(rng, lims);
        t.r = 0.0;
        const auto p = sensing::sensing_pattern(t);
        const auto gs = sensing::guaranteed_region(t);
        exact = exact && gs && gs->center == p.center && gs->semi_major == p.semi_major &&
                gs->semi_minor == p.semi_minor && gs->orientation == p.orientation;
    }
    const bool p_ends = sensing::quality_term(lims.z_min, lims.z_min, lims.z_max) == 1.0 &&
                        sensing::quality_term(lims.z_max, lims.z_min, lims.z_max) == 0.0 &&
                        sensing::quality_term(0.0, 0.0, lims.h_max) == 1.0 &&
                        sensing::quality_term(lims.h_max, 0.0, lims.h_max) == 0.0 &&
                        sensing::quality_term(lims.delta_min, lims.delta_min, lims.delta_max) == 1.0 &&
                        sensing::quality_term(lims.delta_max, lims.delta_min, lims.delta_max) == 0.0;
    sensing::AgentState best;
    best.z = lims.z_min;
    best.h = 0.0;
    best.delta = lims.delta_min;
    best.r = lims.r;
    const double f_best = sensing::quality(best, lims).f;
    const bool ok = worst <= 1e-12 && exact && p_ends && f_best == 1.0;
    report(6, "closed forms", ok,
           fmt("circle error %.3g, r=0 identical %s, p endpoints %s, f(z_min,0,delta_min) = %.17g", worst,
               exact ? "yes" : "no", p_ends ? "exact" : "wrong", f_best));
}

void criterion_7() {
    Rng rng(7070);
    const auto lims = testing::test_limits();
    const double step = 1e-6;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const auto s = testing::random_state(rng, lims);
        const double t = rng.uniform(0, 2 * M_PI);
        const auto j = sensing::boundary_jacobians(s, t);
        auto fd = [&](auto set) {
            sensing::AgentState p = s, m = s;
            set(p, step);
            set(m, -step);
            return (1.0 / (2 * step)) * (sensing::boundary_point(p, t) - sensing::boundary_point(m, t));
        };
        auto rel = [&](geom2d::Point analytic, geom2d::Point numeric) {
            worst = std::max(worst, geom2d::norm(analytic - numeric) / geom2d::norm(numeric));
        };
        rel(j.u * geom2d::Point{1, 0}, fd([](sensing::AgentState& a, double e) { a.q.x += e; }));
        rel(j.u * geom2d::Point{0, 1}, fd([](sensing::AgentState& a, double e) { a.q.y += e; }));
        rel(j.v, fd([](sensing::AgentState& a, double e) { a.z += e; }));
        rel(j.tau, fd([](sensing::AgentState& a, double e) { a.theta += e; }));
        rel(j.sigma, fd([](sensing::AgentState& a, double e) { a.h += e; }));
        rel(j.mu, fd([](sensing::AgentState& a, double e) { a.delta += e; }));
    }
    report(7, "boundary Jacobians", worst <= 1e-5, fmt("100 states, worst relative error %.3g", worst));
}

void criterion_8(const std::vector<CaseRuns>& cases) {
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const double allowed = 1e-6 * c.scenario.omega.area();
        double worst = 0.0;
        for (const auto& r : c.ptz.records) worst = std::max(worst, std::abs(r.areas.defect));
        ok = ok && worst <= allowed;
        detail += fmt("%s: worst defect %.3g (allowed %.3g) over %zu steps; ", c.name.c_str(), worst, allowed,
                      c.ptz.records.size());
    }
    report(8, "partition tiles omega", ok, detail);
}

void criterion_9(const CaseRuns& c) {
    const auto root = std::filesystem::temp_directory_path() / "ptzcov_acceptance";
    std::filesystem::remove_all(root);
    sim::emit_outputs(c.ptz, (root / "a").string());
    sim::emit_outputs(sim::run(c.scenario), (root / "b").string());
    int files = 0, differing = 0;
    for (const auto& entry : std::filesystem::directory_iterator(root / "a")) {
        ++files;
        const auto other = root / "b" / entry.path().filename();
        if (!std::filesystem::exists(other) || read(entry.path()) != read(other)) ++differing;
    }
    std::filesystem::remove_all(root);
    report(9, "deterministic outputs", files > 0 && differing == 0,
           fmt("%s rerun: %d files compared, %d differ", c.name.c_str(), files, differing));
}

}  // namespace

int main() {
    try {
        std::vector<CaseRuns> cases;
        cases.push_back(run_case("case1"));
        cases.push_back(run_case("case2"));

        criterion_1(cases);
        criterion_2();
        criterion_3();
        criterion_4(cases[0]);
        criterion_5(cases);
        criterion_6();
        criterion_7();
        criterion_8(cases);
        criterion_9(cases[0]);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
    return failures == 0 ? 0 : 1;
}
