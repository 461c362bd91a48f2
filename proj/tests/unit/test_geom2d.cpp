#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support.hpp"

using namespace ptzcov;
using namespace ptzcov::geom2d;
using testing::Rng;

namespace {

Region unit_square(double x0 = 0, double y0 = 0) {
    return Region::from_ring({{x0, y0}, {x0 + 1, y0}, {x0 + 1, y0 + 1}, {x0, y0 + 1}});
}

double bbox(const Region& r, int which) {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : r.polygons) {
        for (const auto& v : p.outer) {
            const double c = which == 0 ? v.x : v.y;
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    return hi - lo;
}

}  // namespace

TEST_CASE("ellipse_to_polygon: inscribed square of the unit circle") {
    const auto r = ellipse_to_polygon({{0, 0}, 1, 1, 0}, 4);
    REQUIRE(r.polygons.size() == 1);
    CHECK(r.polygons[0].outer.size() == 4);
    CHECK(area(r) == doctest::Approx(2.0).epsilon(1e-14));
    for (const auto& v : r.polygons[0].outer) CHECK(std::abs(std::abs(v.x) + std::abs(v.y) - 1.0) < 1e-15);
}

TEST_CASE("ellipse_to_polygon: fine polygonization approaches pi a b") {
    const auto r = ellipse_to_polygon({{0, 0}, 2, 1, 0}, 256);
    CHECK(testing::rel_err(area(r), 2 * M_PI) < 1e-3);
}

TEST_CASE("ellipse_to_polygon: quarter-turn swaps the bounding box") {
    const auto r = ellipse_to_polygon({{0, 0}, 2, 1, M_PI / 2}, 64);
    CHECK(bbox(r, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(bbox(r, 1) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("ellipse_to_polygon rejects non-positive axes") {
    CHECK_THROWS_AS(ellipse_to_polygon({{0, 0}, 0, 1, 0}, 16), DegenerateShapeError);
    CHECK_THROWS_AS(ellipse_to_polygon({{0, 0}, 1, -1, 0}, 16), DegenerateShapeError);
}

TEST_CASE("ellipse_to_polygon area is monotone in n and bounded by pi a b") {
    Rng rng(7);
    for (int k = 0; k < 50; ++k) {
        const Ellipse e{{rng.uniform(-2, 2), rng.uniform(-2, 2)}, rng.uniform(0.1, 3), rng.uniform(0.1, 3),
                        rng.uniform(-M_PI, M_PI)};
        double prev = 0.0;
        for (int n = 4; n <= 512; n *= 2) {
            const double a = area(ellipse_to_polygon(e, n));
            CHECK(a >= prev);
            CHECK(a <= e.area() * (1 + 1e-12));
            prev = a;
        }
    }
}

TEST_CASE("boolean operations: hand-checked cases") {
    const Region a = unit_square();
    CHECK(testing::rel_err(area(region_intersect(a, a)), 1.0) < 1e-12);

    const Region far = unit_square(3, 0);
    CHECK(region_intersect(a, far).empty());
    CHECK(area(region_union(a, far)) == doctest::Approx(2.0));

    const Region shifted = unit_square(0.5, 0);
    CHECK(area(region_difference(a, shifted)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("boolean operations: zero-area results are empty regions") {
    const Region touching = unit_square(1, 0);
    CHECK(region_intersect(unit_square(), touching).empty());
    CHECK(region_difference(unit_square(), unit_square()).empty());
}

TEST_CASE("boolean laws on random region pairs") {
    Rng rng(11);
    for (int k = 0; k < 200; ++k) {
        const Region a = testing::random_region(rng), b = testing::random_region(rng);
        const double aa = area(a), ab = area(b);
        const double u = area(region_union(a, b)), i = area(region_intersect(a, b));
        CHECK(testing::rel_err(u + i, aa + ab) < 1e-9);
        const double pieces = area(region_difference(a, b)) + i + area(region_difference(b, a));
        CHECK(testing::rel_err(pieces, u) < 1e-9);
    }
}

TEST_CASE("area: plain, holed and density-weighted") {
    CHECK(area(unit_square()) == doctest::Approx(1.0).epsilon(1e-15));

    Region holed = unit_square();
    holed.polygons[0].holes.push_back({{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.75}, {0.75, 0.25}});
    CHECK(area(holed) == doctest::Approx(0.75).epsilon(1e-15));

    const auto two = DensityField::grid(3, 3, -0.5, -0.5, 1.0, 1.0, std::vector<double>(9, 2.0));
    CHECK(std::abs(area(unit_square(), two) - 2.0) < 1e-6);
}

TEST_CASE("area: bilinear density integrates exactly") {
    // phi(x, y) = 3 + x + 2y + xy sampled on a grid reproduces the bilinear field exactly.
    std::vector<double> s;
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) {
            const double x = -1 + i, y = -1 + j;
            s.push_back(3 + x + 2 * y + x * y);
        }
    }
    const auto phi = DensityField::grid(4, 4, -1, -1, 1, 1, s);
    // Unit square: 3 + 1/2 + 1 + 1/4.
    CHECK(area(unit_square(), phi) == doctest::Approx(4.75).epsilon(1e-13));
    // Triangle (0,0),(1,0),(0,1): 3/2 + 1/6 + 1/3 + 1/24.
    CHECK(area(Region::from_ring({{0, 0}, {1, 0}, {0, 1}}), phi) == doctest::Approx(49.0 / 24.0).epsilon(1e-13));
    CHECK(phi.line_integral(0.5, 0.0, 1.0) == doctest::Approx(3 + 0.5 + 1 + 0.25).epsilon(1e-14));
}

TEST_CASE("density grid text format") {
    const auto d = DensityField::parse("2 2 0 0 1 1\n1 2\n3 4\n");
    CHECK(d(Point{0.5, 0.5}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(DensityField::parse("2 2 0 0 1 1\n1 2 3\n"), Error);
}

TEST_CASE("contains: ellipse") {
    const Ellipse circle{{0, 0}, 1, 1, 0};
    CHECK(contains(circle, {0, 0}));
    CHECK_FALSE(contains(circle, {1, 0}, Boundary::Strict));
    CHECK(contains(circle, {1, 0}, Boundary::Inclusive));
    const Ellipse tall{{0, 0}, 2, 1, M_PI / 2};
    CHECK(tall.quadratic_form({0, 1.5}) == doctest::Approx(0.5625).epsilon(1e-14));
    CHECK(contains(tall, {0, 1.5}));
}

TEST_CASE("contains: polygon and region") {
    const ConvexPolygon sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(contains(sq, {0.5, 0.5}));
    CHECK(contains(sq, {1, 0.5}));
    CHECK_FALSE(contains(sq, {1, 0.5}, Boundary::Strict));
    CHECK_FALSE(contains(sq, {1.1, 0.5}));

    Region holed = unit_square();
    holed.polygons[0].holes.push_back({{0.25, 0.25}, {0.25, 0.75}, {0.75, 0.75}, {0.75, 0.25}});
    CHECK_FALSE(contains(holed, {0.5, 0.5}));
    CHECK(contains(holed, {0.1, 0.5}));
}

TEST_CASE("ConvexPolygon validation") {
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {1, 0}}), DegenerateShapeError);
    CHECK_THROWS_AS(ConvexPolygon({{0, 0}, {2, 0}, {1, 0.1}, {2, 2}, {0, 2}}), DegenerateShapeError);
    CHECK_THROWS_AS(ConvexPolygon({{0, 1}, {1, 1}, {1, 0}, {0, 0}}), DegenerateShapeError);  // clockwise
    CHECK(ConvexPolygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}).area() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("project_to_polygon") {
    const ConvexPolygon sq({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(project_to_polygon(sq, {0.3, 0.4}) == Point{0.3, 0.4});
    const Point face = project_to_polygon(sq, {2, 0.5});
    CHECK(face.x == doctest::Approx(1.0));
    CHECK(face.y == doctest::Approx(0.5));
    const Point corner = project_to_polygon(sq, {2, 2});
    CHECK(corner.x == doctest::Approx(1.0));
    CHECK(corner.y == doctest::Approx(1.0));

    Rng rng(3);
    const auto oct = testing::test_omega();
    for (int k = 0; k < 500; ++k) {
        const Point p{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        CHECK(contains(oct, project_to_polygon(oct, p)));
    }
}
