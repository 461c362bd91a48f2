#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace ptzcov;
using namespace ptzcov::sensing;
using geom2d::Point;
using testing::kDeg;
using testing::Rng;

namespace {

AgentState state(double z, double h, double delta, double theta = 0.0, double r = 0.0, Point q = {}) {
    AgentState s;
    s.q = q;
    s.z = z;
    s.h = h;
    s.delta = delta;
    s.theta = theta;
    s.r = r;
    return s;
}

}  // namespace

TEST_CASE("sensing_pattern: downward camera gives a circle at q") {
    const auto e = sensing_pattern(state(1, 0, 30 * kDeg, 1.234, 0, {0.5, -0.25}));
    CHECK(std::abs(e.semi_major - std::tan(30 * kDeg)) < 1e-12);
    CHECK(std::abs(e.semi_minor - std::tan(30 * kDeg)) < 1e-12);
    CHECK(std::abs(e.center.x - 0.5) < 1e-12);
    CHECK(std::abs(e.center.y + 0.25) < 1e-12);
}

TEST_CASE("sensing_pattern: tilted camera closed forms") {
    const auto sh = pattern_shape(1, 30 * kDeg, 15 * kDeg);
    const double t45 = 1.0, t15 = std::tan(15 * kDeg);
    const double a = 0.5 * (t45 - t15), off = 0.5 * (t45 + t15), b = t15 * std::sqrt(1 + off * off);
    CHECK(sh.a == doctest::Approx(a).epsilon(1e-14));
    CHECK(sh.offset == doctest::Approx(off).epsilon(1e-14));
    CHECK(sh.b == doctest::Approx(b).epsilon(1e-14));
    CHECK(a == doctest::Approx(0.36603).epsilon(1e-4));
    CHECK(off == doctest::Approx(0.63397).epsilon(1e-4));
    CHECK(b == doctest::Approx(0.31730).epsilon(1e-4));

    const auto e = sensing_pattern(state(1, 30 * kDeg, 15 * kDeg));
    CHECK(e.center.x == doctest::Approx(off));
    CHECK(std::abs(e.center.y) < 1e-15);
    const auto flipped = sensing_pattern(state(1, 30 * kDeg, 15 * kDeg, M_PI));
    CHECK(flipped.center.x == doctest::Approx(-off));
    CHECK(std::abs(flipped.center.y) < 1e-12);
}

TEST_CASE("sensing_pattern: tilt outside the elliptical regime") {
    CHECK_THROWS_AS(sensing_pattern(state(1, 60 * kDeg, 35 * kDeg)), DomainError);
}

TEST_CASE("guaranteed_region") {
    const auto s0 = state(1, 20 * kDeg, 25 * kDeg, 0.7, 0.0, {1, 2});
    const auto p = sensing_pattern(s0);
    const auto g = guaranteed_region(s0);
    REQUIRE(g.has_value());
    CHECK(g->semi_major == p.semi_major);
    CHECK(g->semi_minor == p.semi_minor);
    CHECK(g->center == p.center);
    CHECK(g->orientation == p.orientation);

    const auto shrunk = guaranteed_region(state(1, 0, 30 * kDeg, 0, 0.1));
    REQUIRE(shrunk.has_value());
    CHECK(shrunk->semi_major == doctest::Approx(std::tan(30 * kDeg) - 0.1).epsilon(1e-14));
    CHECK(shrunk->semi_minor == doctest::Approx(0.47735).epsilon(1e-5));
    CHECK_FALSE(guaranteed_region(state(1, 0, 30 * kDeg, 0, 0.6)).has_value());
}

TEST_CASE("quality: limit values") {
    const auto lims = testing::test_limits();
    CHECK(quality(state(lims.z_min, 0, lims.delta_min), lims).f == 1.0);
    CHECK(quality_term(0.3, 0.3, 3.8) == 1.0);
    CHECK(quality_term(3.8, 0.3, 3.8) == 0.0);
    CHECK(quality_term(2.05, 0.3, 3.8) == doctest::Approx(0.5625).epsilon(1e-14));
    const double f_far = quality(state(lims.z_max, lims.h_max - 1e-9, lims.delta_max), lims).f;
    CHECK(f_far < 1e-12);
    CHECK(f_far >= 0.0);
}

TEST_CASE("AgentLimits validation") {
    CHECK_NOTHROW(testing::test_limits().validate());
    // r must be strictly below z_min tan(delta_min).
    auto bad = testing::test_limits();
    bad.r = bad.z_min * std::tan(bad.delta_min);
    CHECK_THROWS_AS(bad.validate(), Error);
    auto tilt = testing::test_limits();
    tilt.h_max = M_PI / 2 - tilt.delta_max + 0.01;
    CHECK_THROWS_AS(tilt.validate(), Error);
    auto empty = testing::test_limits();
    empty.z_max = empty.z_min;
    CHECK_THROWS_AS(empty.validate(), Error);
}

TEST_CASE("boundary_jacobians: examples") {
    Rng rng(5);
    const auto lims = testing::test_limits();
    for (int k = 0; k < 20; ++k) {
        const auto j = boundary_jacobians(testing::random_state(rng, lims), rng.uniform(0, 2 * M_PI));
        CHECK(j.u.m00 == 1.0);
        CHECK(j.u.m01 == 0.0);
        CHECK(j.u.m10 == 0.0);
        CHECK(j.u.m11 == 1.0);
    }
    const double d = 25 * kDeg;
    const auto j = boundary_jacobians(state(1.3, 0, d, 0.4), 0.0);
    CHECK(geom2d::dot(j.v, j.normal) == doctest::Approx(std::tan(d)).epsilon(1e-14));
    CHECK(j.normal.x == doctest::Approx(std::cos(0.4)).epsilon(1e-14));
    CHECK(j.normal.y == doctest::Approx(std::sin(0.4)).epsilon(1e-14));
}

TEST_CASE("boundary_jacobians match central differences of boundary_point") {
    Rng rng(17);
    const auto lims = testing::test_limits();
    const double step = 1e-6;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const AgentState s = testing::random_state(rng, lims);
        const double t = rng.uniform(0, 2 * M_PI);
        const auto j = boundary_jacobians(s, t);
        auto fd = [&](auto set) {
            AgentState p = s, m = s;
            set(p, step);
            set(m, -step);
            return (1.0 / (2 * step)) * (boundary_point(p, t) - boundary_point(m, t));
        };
        auto check = [&](Point analytic, Point numeric) {
            const double err = geom2d::norm(analytic - numeric) / std::max(geom2d::norm(numeric), 1e-3);
            worst = std::max(worst, err);
            CHECK(err <= 1e-5);
        };
        check(j.u * Point{1, 0}, fd([](AgentState& a, double e) { a.q.x += e; }));
        check(j.u * Point{0, 1}, fd([](AgentState& a, double e) { a.q.y += e; }));
        check(j.v, fd([](AgentState& a, double e) { a.z += e; }));
        check(j.tau, fd([](AgentState& a, double e) { a.theta += e; }));
        check(j.sigma, fd([](AgentState& a, double e) { a.h += e; }));
        check(j.mu, fd([](AgentState& a, double e) { a.delta += e; }));

        // Outward normal: perpendicular to the tangent and pointing away from the center.
        const Point tangent = (1.0 / (2 * step)) * (boundary_point(s, t + step) - boundary_point(s, t - step));
        CHECK(std::abs(geom2d::dot(j.normal, tangent)) < 1e-6 * geom2d::norm(tangent));
        CHECK(geom2d::norm(tangent) == doctest::Approx(j.speed).epsilon(1e-6));
        const auto g = guaranteed_region(s);
        CHECK(geom2d::dot(j.normal, boundary_point(s, t) - g->center) > 0.0);
    }
    MESSAGE("worst relative Jacobian error: " << worst);
}

TEST_CASE("shape properties on sampled states") {
    Rng rng(23);
    const auto lims = testing::test_limits();
    for (int k = 0; k < 300; ++k) {
        const double z = rng.uniform(lims.z_min, lims.z_max - 0.01);
        const double h = rng.uniform(0.0, lims.h_max - 0.02);
        const double d = rng.uniform(lims.delta_min, lims.delta_max - 0.01);

        const auto base = pattern_shape(z, 0.0, d);
        CHECK(std::abs(base.a - base.b) <= 1e-12 * z);
        CHECK(std::abs(base.offset) <= 1e-12 * z);

        const auto s0 = pattern_shape(z, h, d);
        const auto sz = pattern_shape(z + 0.01, h, d);
        const auto sh = pattern_shape(z, h + 0.01, d);
        const auto sd = pattern_shape(z, h, d + 0.01);
        CHECK(sz.a > s0.a);
        CHECK(sz.b > s0.b);
        CHECK(sh.a > s0.a);
        CHECK(pattern_shape(z, -h - 0.01, d).a > s0.a);
        CHECK(sd.a > s0.a);
        CHECK(sd.b > s0.b);

        const AgentState s = state(z, h, d, rng.uniform(-M_PI, M_PI), lims.r);
        const double f = quality(s, lims).f;
        CHECK(quality(state(z + 0.01, h, d, 0, lims.r), lims).f < f);
        CHECK(quality(state(z, h + 0.01, d, 0, lims.r), lims).f < f);
        CHECK(quality(state(z, -h - 0.01, d, 0, lims.r), lims).f < f);
        CHECK(quality(state(z, h, d + 0.01, 0, lims.r), lims).f < f);
    }
}

TEST_CASE("guaranteed region lies inside the sensing pattern") {
    Rng rng(29);
    const auto lims = testing::test_limits();
    for (int k = 0; k < 100; ++k) {
        const AgentState s = testing::random_state(rng, lims);
        const auto outer = sensing_pattern(s);
        for (int m = 0; m < 64; ++m) {
            CHECK(geom2d::contains(outer, boundary_point(s, 2 * M_PI * m / 64), geom2d::Boundary::Inclusive));
        }
    }
}

TEST_CASE("quality partials and shape derivatives match central differences") {
    Rng rng(31);
    const auto lims = testing::test_limits();
    const double e = 1e-6;
    for (int k = 0; k < 200; ++k) {
        AgentState s = testing::random_state(rng, lims);
        const auto qv = quality(s, lims);
        auto f_at = [&](double dz, double dh, double dd) {
            AgentState p = s;
            p.z += dz;
            p.h += dh;
            p.delta += dd;
            return quality(p, lims).f;
        };
        auto close = [](double analytic, double numeric) {
            return std::abs(analytic - numeric) <= 1e-6 * std::max(std::abs(numeric), 1e-2);
        };
        CHECK(close(qv.df_dz, (f_at(e, 0, 0) - f_at(-e, 0, 0)) / (2 * e)));
        CHECK(close(qv.df_dh, (f_at(0, e, 0) - f_at(0, -e, 0)) / (2 * e)));
        CHECK(close(qv.df_ddelta, (f_at(0, 0, e) - f_at(0, 0, -e)) / (2 * e)));

        const double x = rng.uniform(0.3, 3.8);
        const double dp = (quality_term(x + e, 0.3, 3.8) - quality_term(x - e, 0.3, 3.8)) / (2 * e);
        CHECK(close(quality_term_derivative(x, 0.3, 3.8), dp));

        const auto d = pattern_shape_derivatives(s.z, s.h, s.delta);
        const auto p = pattern_shape(s.z, s.h + e, s.delta), m = pattern_shape(s.z, s.h - e, s.delta);
        CHECK(close(d.dh.a, (p.a - m.a) / (2 * e)));
        CHECK(close(d.dh.b, (p.b - m.b) / (2 * e)));
        CHECK(close(d.dh.offset, (p.offset - m.offset) / (2 * e)));
    }
}
