#pragma once

// Hand-rolled generators shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ptzcov/geom2d.hpp"
#include "ptzcov/scenario.hpp"
#include "ptzcov/sensing.hpp"

namespace testing {

using namespace ptzcov;
using geom2d::Point;

inline constexpr double kDeg = M_PI / 180.0;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

/// Limits used throughout the tests: the case-study ranges with a radius-4 workspace in mind.
inline sensing::AgentLimits test_limits(double z_max = 3.8) {
    return sensing::AgentLimits::make(0.3, z_max, 15 * kDeg, 35 * kDeg, 0.05, 50 * kDeg);
}

inline geom2d::ConvexPolygon test_omega() { return geom2d::regular_polygon({0, 0}, 4.0, 8, M_PI / 8); }

/// Random ellipse polygonized finely, or a random convex polygon, both within [-3, 3]^2.
inline geom2d::Region random_region(Rng& rng) {
    if (rng.integer(0, 1) == 0) {
        geom2d::Ellipse e{{rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, rng.uniform(0.3, 1.5),
                          rng.uniform(0.2, 1.0), rng.uniform(-M_PI, M_PI)};
        if (e.semi_minor > e.semi_major) std::swap(e.semi_minor, e.semi_major);
        return geom2d::ellipse_to_polygon(e, rng.integer(8, 96));
    }
    const auto poly = geom2d::regular_polygon({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)}, rng.uniform(0.3, 1.5),
                                              rng.integer(3, 9), rng.uniform(0, M_PI));
    return geom2d::Region::from_polygon(poly);
}

/// Tilt is kept away from its bound so small perturbations stay in the valid regime.
inline sensing::AgentState random_state(Rng& rng, const sensing::AgentLimits& lims, double spread = 2.5) {
    sensing::AgentState s;
    s.q = {rng.uniform(-spread, spread), rng.uniform(-spread, spread)};
    s.z = rng.uniform(lims.z_min, lims.z_max);
    s.theta = rng.uniform(-M_PI, M_PI);
    s.h = rng.uniform(-lims.h_max + 0.05, lims.h_max - 0.05);
    s.delta = rng.uniform(lims.delta_min, lims.delta_max);
    s.r = lims.r;
    return s;
}

/// Agents small enough that several of them interact inside the radius-4 workspace.
inline std::vector<sensing::AgentState> random_agents(Rng& rng, int n, const sensing::AgentLimits& lims) {
    std::vector<sensing::AgentState> out;
    for (int i = 0; i < n; ++i) {
        auto s = random_state(rng, lims);
        s.z = rng.uniform(lims.z_min, std::min(lims.z_max, 1.5));
        s.h = rng.uniform(-0.6, 0.6);
        out.push_back(s);
    }
    return out;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing
