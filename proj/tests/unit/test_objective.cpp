#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ptzcov/objective.hpp"
#include "support.hpp"

using namespace ptzcov;
using namespace ptzcov::objective;
using testing::kDeg;
using testing::Rng;

namespace {

double partition_H(const std::vector<sensing::AgentState>& s, const std::vector<sensing::AgentLimits>& l,
                   const geom2d::ConvexPolygon& omega, int polygonization) {
    const auto p = partition::compute_partition(s, l, omega, {polygonization, 1e-9});
    return objective_from_partition(p, p.qualities, geom2d::DensityField::uniform(1.0)).H;
}

}  // namespace

TEST_CASE("objective_from_partition: unit square cell") {
    partition::Partition p;
    p.cells.push_back(geom2d::Region::from_ring({{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
    const std::vector<double> f{1.0};
    const auto r = objective_from_partition(p, f, geom2d::DensityField::uniform(1.0));
    CHECK(r.H == 1.0);
    CHECK(r.per_agent == std::vector<double>{1.0});
    CHECK(r.neutral_area == 0.0);
    CHECK_THROWS_AS(objective_from_partition(p, std::vector<double>{}, geom2d::DensityField::uniform(1.0)), Error);
}

TEST_CASE("duplicated agent adds nothing") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    sensing::AgentState s;
    s.q = {0.3, -0.2};
    s.z = 1.1;
    s.h = 0.3;
    s.theta = 0.5;
    s.delta = 22 * kDeg;
    s.r = lims.r;
    const double one = partition_H({s}, {lims}, omega, 64);
    const double two = partition_H({s, s}, {lims, lims}, omega, 64);
    CHECK(two == doctest::Approx(one).epsilon(1e-12));
}

TEST_CASE("oracle: trivial and single-ellipse cases") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const auto phi = geom2d::DensityField::uniform(1.0);
    CHECK(objective_grid_oracle({}, {}, omega, phi, 64) == 0.0);

    sensing::AgentState s;
    s.q = {0.2, 0.1};
    s.z = 1.0;
    s.h = 25 * kDeg;
    s.theta = 1.0;
    s.delta = 20 * kDeg;
    s.r = lims.r;
    const auto g = *sensing::guaranteed_region(s);
    const double exact = sensing::quality(s, lims).f * g.area();
    const std::vector<sensing::AgentState> st{s};
    const std::vector<sensing::AgentLimits> l{lims};
    CHECK(testing::rel_err(objective_grid_oracle(st, l, omega, phi, 512), exact) < 1e-2);
    // The scanline oracle is far more accurate than the criterion above demands.
    CHECK(testing::rel_err(objective_grid_oracle(st, l, omega, phi, 512), exact) < 1e-9);
    CHECK(testing::rel_err(objective_point_samples(st, l, omega, phi, 512), exact) < 1e-2);
}

TEST_CASE("oracle self-convergence and agreement with the partition path") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const auto phi = geom2d::DensityField::uniform(1.0);
    Rng rng(53);
    for (int k = 0; k < 25; ++k) {
        const int n = rng.integer(1, 6);
        const auto s = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const double o256 = objective_grid_oracle(s, l, omega, phi, 256);
        const double o512 = objective_grid_oracle(s, l, omega, phi, 512);
        CHECK(testing::rel_err(o256, o512) < 5e-3);
        CHECK(testing::rel_err(partition_H(s, l, omega, 128), o512) < 5e-3);
        CHECK(testing::rel_err(objective_point_samples(s, l, omega, phi, 512), o512) < 1e-2);
    }
}

TEST_CASE("oracle with a non-uniform density matches the partition path") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    std::vector<double> samples;
    for (int j = 0; j < 9; ++j) {
        for (int i = 0; i < 9; ++i) samples.push_back(1.0 + 0.1 * i + 0.05 * j * j);
    }
    const auto phi = geom2d::DensityField::grid(9, 9, -4, -4, 1, 1, samples);
    Rng rng(59);
    for (int k = 0; k < 10; ++k) {
        const int n = rng.integer(1, 4);
        const auto s = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const auto p = partition::compute_partition(s, l, omega, {256, 1e-9});
        const double h = objective_from_partition(p, p.qualities, phi).H;
        CHECK(testing::rel_err(h, objective_grid_oracle(s, l, omega, phi, 512)) < 5e-3);
    }
}

TEST_CASE("H is invariant under relabeling") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    Rng rng(61);
    for (int k = 0; k < 10; ++k) {
        const int n = rng.integer(2, 5);
        auto s = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const double h0 = partition_H(s, l, omega, 64);
        const double o0 = objective_grid_oracle(s, l, omega, geom2d::DensityField::uniform(1.0), 256);
        std::reverse(s.begin(), s.end());
        CHECK(partition_H(s, l, omega, 64) == doctest::Approx(h0).epsilon(1e-10));
        CHECK(objective_grid_oracle(s, l, omega, geom2d::DensityField::uniform(1.0), 256) ==
              doctest::Approx(o0).epsilon(1e-10));
    }
}

TEST_CASE("raising one agent's quality with its footprint fixed never lowers the oracle H") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const auto phi = geom2d::DensityField::uniform(1.0);
    Rng rng(67);
    for (int k = 0; k < 20; ++k) {
        const int n = rng.integer(1, 4);
        const auto s = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const int i = rng.integer(0, n - 1);
        // A wider altitude range raises p(z), hence f_i, at the same state and footprint.
        auto boosted = l;
        boosted[i].z_max += 0.5;
        REQUIRE(sensing::quality(s[i], boosted[i]).f > sensing::quality(s[i], l[i]).f);
        const double before = objective_grid_oracle(s, l, omega, phi, 512);
        const double after = objective_grid_oracle(s, boosted, omega, phi, 512);
        CHECK(after >= before - 1e-12 * std::abs(before));
    }
}
