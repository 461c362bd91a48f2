#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ptzcov/control.hpp"
#include "ptzcov/diagnostics.hpp"
#include "ptzcov/objective.hpp"
#include "support.hpp"

using namespace ptzcov;
using namespace ptzcov::control;
using testing::kDeg;
using testing::Rng;

namespace {

struct Setup {
    geom2d::ConvexPolygon omega = testing::test_omega();
    geom2d::DensityField phi = geom2d::DensityField::uniform(1.0);
    std::vector<sensing::AgentState> states;
    std::vector<sensing::AgentLimits> lims;

    Snapshot snapshot() const { return {states, lims, &omega, &phi, 1e-9}; }
    partition::Partition part(int n = 256) const { return partition::compute_partition(states, lims, omega, {n, 1e-9}); }
};

sensing::AgentState agent(double x, double y, double z, double h = 0.0, double delta = 20 * kDeg, double theta = 0.0) {
    sensing::AgentState s;
    s.q = {x, y};
    s.z = z;
    s.h = h;
    s.delta = delta;
    s.theta = theta;
    s.r = 0.05;
    return s;
}

double oracle_dz(Setup su, int i, double step = 1e-4) {
    su.states[i].z += step;
    const double hp = objective::objective_grid_oracle(su.states, su.lims, su.omega, su.phi, 1024);
    su.states[i].z -= 2 * step;
    const double hm = objective::objective_grid_oracle(su.states, su.lims, su.omega, su.phi, 1024);
    return (hp - hm) / (2 * step);
}

}  // namespace

TEST_CASE("isolated agent: all samples are free arcs") {
    Setup su;
    su.states = {agent(0, 0, 1.0, 0.2)};
    su.lims = {testing::test_limits()};
    const auto samples = boundary_samples(0, su.snapshot(), 128);
    REQUIRE(samples.size() == 128);
    for (const auto& s : samples) CHECK(s.classification.kind == ArcKind::FreeArc);
}

TEST_CASE("agent inside a strictly better region is suppressed and receives no control") {
    Setup su;
    // Agent 1's footprint lies inside agent 0's; its narrow limits leave it with the lower quality.
    su.states = {agent(0, 0, 0.5, 0.0, 30 * kDeg), agent(0.02, 0, 0.6, 0.0, 16 * kDeg)};
    su.lims = {testing::test_limits(), sensing::AgentLimits::make(0.3, 0.65, 15 * kDeg, 16 * kDeg, 0.05, 50 * kDeg)};
    REQUIRE(sensing::quality(su.states[0], su.lims[0]).f > sensing::quality(su.states[1], su.lims[1]).f);
    const auto samples = boundary_samples(1, su.snapshot(), 180);
    for (const auto& s : samples) CHECK(s.classification.kind == ArcKind::Suppressed);
    const auto p = su.part();
    CHECK(p.cells[1].empty());
    const auto u = control_input(1, su.snapshot(), p, Gains{});
    CHECK(u.norm() == 0.0);
}

TEST_CASE("equal-quality overlap contributes nothing") {
    Setup su;
    su.states = {agent(-0.2, 0, 1.0), agent(0.2, 0, 1.0)};
    su.lims = {testing::test_limits(), testing::test_limits()};
    const auto samples = boundary_samples(0, su.snapshot(), 360);
    int overlapped = 0;
    for (const auto& s : samples) {
        if (s.classification.kind == ArcKind::DominatedByNeighbor) {
            ++overlapped;
            CHECK(s.classification.neighbor == 1);
            CHECK(sensing::quality(su.states[0], su.lims[0]).f - s.classification.neighbor_quality == 0.0);
        }
    }
    CHECK(overlapped > 0);
    // Translating apart grows the union: the overlap pushes agent 0 in -x only.
    const auto u = objective_gradient(0, su.snapshot(), su.part());
    CHECK(u.u_q.x < 0.0);
    CHECK(std::abs(u.u_q.y) < 1e-10);
}

TEST_CASE("symmetric lone agent: no translation or pan") {
    Setup su;
    su.states = {agent(0.1, -0.3, 1.2, 0.0, 25 * kDeg, 0.7)};
    su.lims = {testing::test_limits()};
    const auto u = control_input(0, su.snapshot(), su.part(), Gains{});
    CHECK(std::abs(u.u_q.x) < 1e-12);
    CHECK(std::abs(u.u_q.y) < 1e-12);
    CHECK(std::abs(u.u_theta) < 1e-12);
}

TEST_CASE("lone downward agent: altitude control closed form and oracle derivative") {
    Setup su;
    const auto lims = testing::test_limits();
    su.lims = {lims};
    for (double z : {0.5, 1.0, 2.0, 3.0}) {
        const double d = 20 * kDeg;
        su.states = {agent(0, 0, z, 0.0, d)};
        const double rad = z * std::tan(d) - lims.r;
        const double f = sensing::quality(su.states[0], lims).f;
        const double dp = sensing::quality_term_derivative(z, lims.z_min, lims.z_max);
        const double closed = std::tan(d) * f * 2 * M_PI * rad + dp / 3.0 * M_PI * rad * rad;

        Gains g;
        g.z = 0.7;
        const auto u = control_input(0, su.snapshot(), su.part(1024), g);
        CHECK(std::signbit(u.u_z) == std::signbit(g.z * closed));
        CHECK(testing::rel_err(u.u_z / g.z, closed) < 1e-4);
        CHECK(testing::rel_err(u.u_z / g.z, oracle_dz(su, 0)) < 0.02);
    }
}

TEST_CASE("gradient matches oracle finite differences on random scenarios") {
    Rng rng(71);
    const auto lims = testing::test_limits();
    for (int k = 0; k < 4; ++k) {
        const int n = rng.integer(1, 3);
        const auto s = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        sim::GradientCheckOptions opts;
        opts.oracle_resolution = 512;
        for (const auto& e : sim::check_gradients(s, l, testing::test_omega(), geom2d::DensityField::uniform(1.0), opts)) {
            INFO("agent " << e.agent << " " << sim::to_string(e.component) << " analytic " << e.analytic << " fd "
                          << e.finite_difference);
            CHECK(e.pass);
        }
    }
}

TEST_CASE("gains scale each component") {
    Setup su;
    su.states = {agent(-0.3, 0.1, 1.0, 0.3, 22 * kDeg, 0.4), agent(0.4, 0.0, 1.3, -0.2, 18 * kDeg, 2.0)};
    su.lims = {testing::test_limits(), testing::test_limits()};
    const auto p = su.part();
    const auto raw = objective_gradient(0, su.snapshot(), p);
    const Gains g{2.0, 3.0, 0.5, 0.25, 4.0};
    const auto u = control_input(0, su.snapshot(), p, g);
    CHECK(u.u_q.x == 2.0 * raw.u_q.x);
    CHECK(u.u_q.y == 2.0 * raw.u_q.y);
    CHECK(u.u_z == 3.0 * raw.u_z);
    CHECK(u.u_theta == 0.5 * raw.u_theta);
    CHECK(u.u_h == 0.25 * raw.u_h);
    CHECK(u.u_delta == 4.0 * raw.u_delta);
    CHECK_THROWS_AS((Gains{0.0, 1, 1, 1, 1}.validate()), Error);
}

TEST_CASE("relabeling permutes controls") {
    Rng rng(73);
    const auto lims = testing::test_limits();
    for (int k = 0; k < 5; ++k) {
        const int n = rng.integer(2, 4);
        Setup a;
        a.states = testing::random_agents(rng, n, lims);
        a.lims.assign(n, lims);
        Setup b = a;
        std::reverse(b.states.begin(), b.states.end());
        const auto pa = a.part(64), pb = b.part(64);
        for (int i = 0; i < n; ++i) {
            const auto ua = control_input(i, a.snapshot(), pa, Gains{});
            const auto ub = control_input(n - 1 - i, b.snapshot(), pb, Gains{});
            CHECK(ua.u_q.x == doctest::Approx(ub.u_q.x).epsilon(1e-9).scale(1.0));
            CHECK(ua.u_q.y == doctest::Approx(ub.u_q.y).epsilon(1e-9).scale(1.0));
            CHECK(ua.u_z == doctest::Approx(ub.u_z).epsilon(1e-9).scale(1.0));
            CHECK(ua.u_theta == doctest::Approx(ub.u_theta).epsilon(1e-9).scale(1.0));
            CHECK(ua.u_h == doctest::Approx(ub.u_h).epsilon(1e-9).scale(1.0));
            CHECK(ua.u_delta == doctest::Approx(ub.u_delta).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("empty guaranteed region gives zero control") {
    Setup su;
    auto s = agent(0, 0, 1.0);
    s.r = 10.0;
    su.states = {s};
    su.lims = {testing::test_limits()};
    CHECK(control_input(0, su.snapshot(), su.part(), Gains{}).norm() == 0.0);
}

TEST_CASE("project_state") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const auto s = agent(0.5, 0.5, 1.0, 0.2, 20 * kDeg, 0.3);

    const auto same = project_state(s, ControlInput{}, 0.1, lims, omega);
    CHECK(same.q == s.q);
    CHECK(same.z == s.z);
    CHECK(same.theta == s.theta);
    CHECK(same.h == s.h);
    CHECK(same.delta == s.delta);

    auto top = s;
    top.z = lims.z_max;
    ControlInput up;
    up.u_z = 5.0;
    CHECK(project_state(top, up, 0.1, lims, omega).z == lims.z_max);

    // Omega's right face is x = 4 cos(pi/8); step just past it.
    const double face = 4 * std::cos(M_PI / 8);
    auto edge = s;
    edge.q = {face - 0.01, 0.0};
    ControlInput out;
    out.u_q = {1.0, 0.0};
    const auto moved = project_state(edge, out, 0.02, lims, omega);
    CHECK(moved.q.x == doctest::Approx(face).epsilon(1e-12));
    CHECK(std::abs(moved.q.y) < 1e-12);

    ControlInput tilt;
    tilt.u_h = 100.0;
    tilt.u_delta = -100.0;
    tilt.u_theta = 100.0;
    const auto clamped = project_state(s, tilt, 1.0, lims, omega);
    CHECK(clamped.h == doctest::Approx(lims.h_max - 1e-6).epsilon(1e-15));
    CHECK(clamped.h < lims.h_max);
    CHECK(clamped.delta == lims.delta_min);
    CHECK(clamped.theta >= -M_PI);
    CHECK(clamped.theta <= M_PI);
    CHECK_THROWS_AS(project_state(s, tilt, 0.0, lims, omega), Error);
}

TEST_CASE("zero control at a constrained optimum with disjoint regions") {
    // Lone-agent optimum for these limits sits at z interior, h and delta at their bounds;
    // find z by bisection on the raw altitude gradient and check all projected controls vanish.
    Setup su;
    su.omega = geom2d::regular_polygon({0, 0}, 200.0, 8);
    auto lims = testing::test_limits();
    su.lims = {lims, lims};
    const double h = lims.h_max - 1e-6;
    auto make = [&](double z) {
        return std::vector<sensing::AgentState>{agent(-60, 0, z, h, lims.delta_max, 0.0),
                                                agent(60, 0, z, h, lims.delta_max, M_PI)};
    };
    double lo = 1.0, hi = 3.5;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        su.states = make(mid);
        (objective_gradient(0, su.snapshot(), su.part(1024)).u_z > 0 ? lo : hi) = mid;
    }
    su.states = make(0.5 * (lo + hi));
    const auto p = su.part(1024);
    for (int i = 0; i < 2; ++i) {
        const auto u = control_input(i, su.snapshot(), p, Gains{});
        const auto v = projected_velocity(su.states[i], u, 1e-3, lims, su.omega);
        CHECK(v.norm() < 1e-6);
    }
}
