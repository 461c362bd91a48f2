#include <cmath>

#include "doctest.h"
#include "ptzcov/partition.hpp"
#include "support.hpp"

using namespace ptzcov;
using namespace ptzcov::partition;
using geom2d::Region;
using testing::kDeg;
using testing::Rng;

namespace {

sensing::AgentState circle_agent(double x, double y, double z, double r = 0.05) {
    sensing::AgentState s;
    s.q = {x, y};
    s.z = z;
    s.delta = 20 * kDeg;
    s.r = r;
    return s;
}

double total_area(const Partition& p) {
    double a = geom2d::area(p.neutral);
    for (const auto& c : p.cells) a += geom2d::area(c);
    for (const auto& c : p.common) a += geom2d::area(c.region);
    return a;
}

std::vector<Region> pieces(const Partition& p) {
    std::vector<Region> out(p.cells.begin(), p.cells.end());
    for (const auto& c : p.common) out.push_back(c.region);
    out.push_back(p.neutral);
    return out;
}

}  // namespace

TEST_CASE("single agent inside omega") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const std::vector<sensing::AgentState> s{circle_agent(0.5, 0.2, 1.0)};
    const std::vector<sensing::AgentLimits> l{lims};
    const auto p = compute_partition(s, l, omega);
    REQUIRE(p.cells.size() == 1);
    CHECK(p.common.empty());
    CHECK(p.neighbors[0].empty());
    const double cell = geom2d::area(p.cells[0]);
    const double g = geom2d::area(geom2d::ellipse_to_polygon(*sensing::guaranteed_region(s[0]), 64));
    CHECK(cell == doctest::Approx(g).epsilon(1e-12));
    CHECK(geom2d::area(p.neutral) == doctest::Approx(omega.area() - g).epsilon(1e-12));
}

TEST_CASE("identical agents share one common region") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    const std::vector<sensing::AgentState> s{circle_agent(0.1, 0.1, 1.2), circle_agent(0.1, 0.1, 1.2)};
    const std::vector<sensing::AgentLimits> l{lims, lims};
    const auto p = compute_partition(s, l, omega);
    CHECK(p.cells[0].empty());
    CHECK(p.cells[1].empty());
    REQUIRE(p.common.size() == 1);
    CHECK(p.common[0].agents == std::vector<int>{0, 1});
    CHECK(p.common[0].quality == sensing::quality(s[0], lims).f);
    CHECK(geom2d::area(p.common[0].region) == doctest::Approx(geom2d::area(p.guaranteed[0])).epsilon(1e-12));
    CHECK(p.neighbors[0] == std::vector<int>{1});
}

TEST_CASE("better agent keeps the overlap") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    // Lower altitude means higher quality.
    const std::vector<sensing::AgentState> s{circle_agent(-0.2, 0, 1.0), circle_agent(0.3, 0, 1.4)};
    const std::vector<sensing::AgentLimits> l{lims, lims};
    const auto p = compute_partition(s, l, omega);
    REQUIRE(p.qualities[0] > p.qualities[1]);
    const Region g0 = p.guaranteed[0], g1 = p.guaranteed[1];
    CHECK(geom2d::area(p.cells[0]) == doctest::Approx(geom2d::area(g0)).epsilon(1e-12));
    CHECK(geom2d::area(p.cells[1]) ==
          doctest::Approx(geom2d::area(geom2d::region_difference(g1, g0))).epsilon(1e-12));
    CHECK(p.common.empty());
    const double covered = geom2d::area(geom2d::region_union(g0, g1));
    CHECK(geom2d::area(p.cells[0]) + geom2d::area(p.cells[1]) == doctest::Approx(covered).epsilon(1e-12));
}

TEST_CASE("empty guaranteed region gives an empty cell and no edges") {
    const auto omega = testing::test_omega();
    auto lims = testing::test_limits();
    auto s = circle_agent(0, 0, 1.0, 0.0);
    s.r = 5.0;  // larger than the pattern: nothing is guaranteed
    const std::vector<sensing::AgentState> states{s, circle_agent(0, 0, 1.0)};
    const std::vector<sensing::AgentLimits> l{lims, lims};
    const auto p = compute_partition(states, l, omega);
    CHECK(p.cells[0].empty());
    CHECK(p.neighbors[0].empty());
    CHECK(p.neighbors[1].empty());
}

TEST_CASE("partition invariants on random scenarios") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    Rng rng(41);
    for (int k = 0; k < 40; ++k) {
        const int n = rng.integer(1, 6);
        const auto s = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const auto p = compute_partition(s, l, omega, {128, 1e-9});

        // Exact cover of Omega.
        CHECK(std::abs(tiling_defect(p, omega)) <= 1e-6 * omega.area());
        CHECK(total_area(p) == doctest::Approx(omega.area()).epsilon(1e-9));

        // Pairwise disjoint pieces.
        const auto parts = pieces(p);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            for (std::size_t j = i + 1; j < parts.size(); ++j) {
                CHECK(geom2d::area(geom2d::region_intersect(parts[i], parts[j])) <= 1e-9 * omega.area());
            }
        }

        // Neighbor relation is symmetric.
        for (int i = 0; i < n; ++i) {
            for (int j : p.neighbors[i]) CHECK(std::find(p.neighbors[j].begin(), p.neighbors[j].end(), i) != p.neighbors[j].end());
        }

        // Quality dominance on sampled points of each cell.
        for (int i = 0; i < n; ++i) {
            if (p.cells[i].empty()) continue;
            int hits = 0;
            for (int m = 0; m < 4000 && hits < 250; ++m) {
                const geom2d::Point q{rng.uniform(-4, 4), rng.uniform(-4, 4)};
                if (!geom2d::contains(p.cells[i], q, geom2d::Boundary::Strict)) continue;
                ++hits;
                for (int j = 0; j < n; ++j) {
                    if (j == i || !geom2d::contains(p.guaranteed[j], q, geom2d::Boundary::Strict)) continue;
                    CHECK(p.qualities[j] <= p.qualities[i] + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("polygonization 64 versus 256 is stable") {
    const auto omega = testing::test_omega();
    const auto lims = testing::test_limits();
    Rng rng(43);
    for (int k = 0; k < 20; ++k) {
        const int n = rng.integer(1, 5);
        const auto s = testing::random_agents(rng, n, lims);
        const std::vector<sensing::AgentLimits> l(n, lims);
        const auto coarse = compute_partition(s, l, omega, {64, 1e-9});
        const auto fine = compute_partition(s, l, omega, {256, 1e-9});
        double sym = 0.0;
        for (int i = 0; i < n; ++i) {
            sym += geom2d::area(geom2d::region_difference(coarse.cells[i], fine.cells[i]));
            sym += geom2d::area(geom2d::region_difference(fine.cells[i], coarse.cells[i]));
        }
        sym += geom2d::area(geom2d::region_difference(coarse.neutral, fine.neutral));
        sym += geom2d::area(geom2d::region_difference(fine.neutral, coarse.neutral));
        CHECK(sym <= 0.01 * omega.area());
    }
}
