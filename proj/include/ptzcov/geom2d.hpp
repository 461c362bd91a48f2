#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ptzcov {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a shape invariant (non-positive axis, too few vertices, non-convex ring).
class DegenerateShapeError : public Error {
public:
    using Error::Error;
};

/// Agent state outside the regime a closed form is valid for.
class DomainError : public Error {
public:
    using Error::Error;
};

namespace geom2d {

/// Point-on-boundary classification and degenerate-ring pruning tolerance, world units.
inline constexpr double kDefaultEps = 1e-9;
inline constexpr int kDefaultPolygonization = 64;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline Point rotate(Point p, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

using Ring = std::vector<Point>;

/// Signed shoelace area; positive for counter-clockwise rings.
double signed_area(std::span<const Point> ring);

/// Strictly convex, counter-clockwise polygon. Construction validates.
class ConvexPolygon {
public:
    explicit ConvexPolygon(Ring vertices);

    const Ring& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    double area() const { return signed_area(vertices_); }

    // Axis-aligned bounds.
    double min_x() const;
    double max_x() const;
    double min_y() const;
    double max_y() const;

    /// Intersection of the horizontal line at height y with the polygon, as [x_lo, x_hi].
    std::optional<std::pair<double, double>> horizontal_chord(double y) const;

private:
    Ring vertices_;
};

struct Ellipse {
    Point center;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double orientation = 0.0;  // direction of the semi-major axis, radians

    /// Quadratic form ||diag(1/a,1/b) R^T(theta) (p - c)||^2; <= 1 inside.
    double quadratic_form(Point p) const;
    Point point_at(double t) const;
    double area() const { return M_PI * semi_major * semi_minor; }
};

struct PolygonWithHoles {
    Ring outer;               // counter-clockwise
    std::vector<Ring> holes;  // clockwise
};

/// Planar set as a list of simple polygons with holes.
struct Region {
    std::vector<PolygonWithHoles> polygons;

    bool empty() const { return polygons.empty(); }
    static Region from_ring(Ring ring);
    static Region from_polygon(const ConvexPolygon& poly) { return from_ring(poly.vertices()); }
};

/// Importance density over the plane: uniform constant or bilinear grid of samples.
class DensityField {
public:
    DensityField() = default;
    static DensityField uniform(double value);
    /// samples are row-major: samples[j * nx + i] lives at (x0 + i*dx, y0 + j*dy).
    static DensityField grid(int nx, int ny, double x0, double y0, double dx, double dy,
                             std::vector<double> samples);
    /// Parses the plain-text matrix format: header "nx ny x0 y0 dx dy" then nx*ny values.
    static DensityField load(const std::string& path);
    static DensityField parse(const std::string& text);

    bool is_uniform() const { return samples_.empty(); }
    double uniform_value() const { return value_; }
    double operator()(Point p) const;

    /// Exact integral of the field along the horizontal segment y, x in [x0, x1].
    double line_integral(double y, double x0, double x1) const;

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    double dx() const { return dx_; }
    double dy() const { return dy_; }

private:
    double value_ = 1.0;
    int nx_ = 0, ny_ = 0;
    double x0_ = 0, y0_ = 0, dx_ = 1, dy_ = 1;
    std::vector<double> samples_;

    double sample(int i, int j) const;
};

enum class Boundary { Inclusive, Strict };

Region ellipse_to_polygon(const Ellipse& e, int n_vertices = kDefaultPolygonization);

Region region_intersect(const Region& a, const Region& b);
Region region_union(const Region& a, const Region& b);
Region region_difference(const Region& a, const Region& b);
Region region_union_all(std::span<const Region> regions);

/// Mass of the region under the density: shoelace area for uniform fields, exact
/// cell-by-cell integration of the bilinear interpolant for grids.
double area(const Region& r, const DensityField& density = DensityField::uniform(1.0));

bool contains(const Ellipse& e, Point p, Boundary mode = Boundary::Inclusive);
bool contains(const ConvexPolygon& poly, Point p, Boundary mode = Boundary::Inclusive,
              double tol = kDefaultEps);
bool contains(const Region& r, Point p, Boundary mode = Boundary::Inclusive,
              double tol = kDefaultEps);

Point project_to_polygon(const ConvexPolygon& poly, Point p);

/// Regular polygon helper used by scenarios and tests.
ConvexPolygon regular_polygon(Point center, double circumradius, int n, double phase = 0.0);

}  // namespace geom2d
}  // namespace ptzcov
