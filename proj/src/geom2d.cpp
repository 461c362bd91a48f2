#include "ptzcov/geom2d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "clipper.hpp"

namespace ptzcov::geom2d {

namespace cl = ClipperLib;

namespace {

// Rings whose |area| falls below this are pruned from boolean results.
constexpr double kMinRingArea = kDefaultEps * kDefaultEps;

// Booleans run on a power-of-two integer lattice so the double <-> integer round trip is
// exact for lattice points; the scale is chosen per operation from the coordinate range.
double lattice_scale(const Region& a, const Region& b) {
    double m = 1.0;
    for (const Region* r : {&a, &b}) {
        for (const auto& pwh : r->polygons) {
            for (const auto& p : pwh.outer) m = std::max({m, std::abs(p.x), std::abs(p.y)});
        }
    }
    if (!std::isfinite(m)) throw Error("polygon coordinates must be finite");
    int e = 0;
    std::frexp(m, &e);  // m < 2^e
    return std::ldexp(1.0, std::min(60 - e, 52));
}

cl::Path to_path(const Ring& ring, double scale) {
    cl::Path path;
    path.reserve(ring.size());
    for (const auto& p : ring) path.emplace_back(std::llround(p.x * scale), std::llround(p.y * scale));
    return path;
}

cl::Paths to_paths(const Region& r, double scale) {
    cl::Paths out;
    for (const auto& pwh : r.polygons) {
        out.push_back(to_path(pwh.outer, scale));
        if (!cl::Orientation(out.back())) cl::ReversePath(out.back());
        for (const auto& hole : pwh.holes) {
            out.push_back(to_path(hole, scale));
            if (cl::Orientation(out.back())) cl::ReversePath(out.back());
        }
    }
    return out;
}

Ring from_path(const cl::Path& path, double scale) {
    Ring ring;
    ring.reserve(path.size());
    for (const auto& p : path) ring.push_back({static_cast<double>(p.X) / scale, static_cast<double>(p.Y) / scale});
    return ring;
}

void collect(const cl::PolyNode& outer, double scale, Region& r) {
    PolygonWithHoles pwh;
    pwh.outer = from_path(outer.Contour, scale);
    if (pwh.outer.size() >= 3 && std::abs(signed_area(pwh.outer)) >= kMinRingArea) {
        if (signed_area(pwh.outer) < 0) std::reverse(pwh.outer.begin(), pwh.outer.end());
        for (const cl::PolyNode* hole : outer.Childs) {
            Ring h = from_path(hole->Contour, scale);
            if (h.size() < 3 || std::abs(signed_area(h)) < kMinRingArea) continue;
            if (signed_area(h) > 0) std::reverse(h.begin(), h.end());
            pwh.holes.push_back(std::move(h));
        }
        r.polygons.push_back(std::move(pwh));
    }
    // Islands inside holes are outers of their own.
    for (const cl::PolyNode* hole : outer.Childs) {
        for (const cl::PolyNode* island : hole->Childs) collect(*island, scale, r);
    }
}

Region boolean_op(const Region& a, const Region& b, cl::ClipType op, const char* name) {
    const double scale = lattice_scale(a, b);
    cl::Clipper c;
    c.StrictlySimple(true);
    cl::PolyTree tree;
    try {
        c.AddPaths(to_paths(a, scale), cl::ptSubject, true);
        c.AddPaths(to_paths(b, scale), cl::ptClip, true);
        if (!c.Execute(op, tree, cl::pftNonZero, cl::pftNonZero)) throw Error("clipper reported failure");
    } catch (const cl::clipperException& e) {
        throw Error(std::string("polygon ") + name + " failed: " + e.what());
    }
    Region r;
    for (const cl::PolyNode* outer : tree.Childs) collect(*outer, scale, r);
    return r;
}

// Integrals of {1, x, y, xy} over a simple ring via Green's theorem.
struct Moments {
    double m1 = 0, mx = 0, my = 0, mxy = 0;
};

Moments ring_moments(const Ring& ring) {
    Moments m;
    const std::size_t n = ring.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = ring[k];
        const auto& q = ring[(k + 1) % n];
        const double x0 = p.x, y0 = p.y;
        const double x1 = q.x, y1 = q.y;
        const double c = x0 * y1 - x1 * y0;
        m.m1 += c / 2.0;
        m.mx += (x0 + x1) * c / 6.0;
        m.my += (y0 + y1) * c / 6.0;
        m.mxy += c * (x0 * y1 + 2.0 * x0 * y0 + 2.0 * x1 * y1 + x1 * y0) / 24.0;
    }
    return m;
}

}  // namespace

double signed_area(std::span<const Point> ring) {
    const std::size_t n = ring.size();
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += cross(ring[k], ring[(k + 1) % n]);
    return 0.5 * s;
}

// ---------------------------------------------------------------------------
// ConvexPolygon

ConvexPolygon::ConvexPolygon(Ring vertices) : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) throw DegenerateShapeError("convex polygon needs at least 3 vertices");
    for (const auto& p : vertices_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw DegenerateShapeError("convex polygon has a non-finite vertex");
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Point e0 = vertices_[(k + 1) % n] - vertices_[k];
        const Point e1 = vertices_[(k + 2) % n] - vertices_[(k + 1) % n];
        if (cross(e0, e1) <= 0.0)
            throw DegenerateShapeError("polygon is not strictly convex and counter-clockwise at vertex " +
                                       std::to_string((k + 1) % n));
    }
    // Convex turning at every vertex plus a total turn of 2*pi rules out self-intersection.
    double turn = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Point e0 = vertices_[(k + 1) % n] - vertices_[k];
        const Point e1 = vertices_[(k + 2) % n] - vertices_[(k + 1) % n];
        turn += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    if (std::abs(turn - 2.0 * M_PI) > 1e-6) throw DegenerateShapeError("convex polygon winds more than once");
}

double ConvexPolygon::min_x() const {
    return std::min_element(vertices_.begin(), vertices_.end(), [](auto a, auto b) { return a.x < b.x; })->x;
}
double ConvexPolygon::max_x() const {
    return std::max_element(vertices_.begin(), vertices_.end(), [](auto a, auto b) { return a.x < b.x; })->x;
}
double ConvexPolygon::min_y() const {
    return std::min_element(vertices_.begin(), vertices_.end(), [](auto a, auto b) { return a.y < b.y; })->y;
}
double ConvexPolygon::max_y() const {
    return std::max_element(vertices_.begin(), vertices_.end(), [](auto a, auto b) { return a.y < b.y; })->y;
}

std::optional<std::pair<double, double>> ConvexPolygon::horizontal_chord(double y) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = vertices_.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point p = vertices_[k], q = vertices_[(k + 1) % n];
        const double ylo = std::min(p.y, q.y), yhi = std::max(p.y, q.y);
        if (y < ylo || y > yhi) continue;
        if (p.y == q.y) {
            lo = std::min({lo, p.x, q.x});
            hi = std::max({hi, p.x, q.x});
            continue;
        }
        const double x = p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (!(lo <= hi)) return std::nullopt;
    return std::make_pair(lo, hi);
}

ConvexPolygon regular_polygon(Point center, double circumradius, int n, double phase) {
    Ring ring;
    for (int k = 0; k < n; ++k) {
        const double t = phase + 2.0 * M_PI * k / n;
        ring.push_back({center.x + circumradius * std::cos(t), center.y + circumradius * std::sin(t)});
    }
    return ConvexPolygon(std::move(ring));
}

// ---------------------------------------------------------------------------
// Ellipse

double Ellipse::quadratic_form(Point p) const {
    const Point d = rotate(p - center, -orientation);
    const double u = d.x / semi_major, v = d.y / semi_minor;
    return u * u + v * v;
}

Point Ellipse::point_at(double t) const {
    return center + rotate({semi_major * std::cos(t), semi_minor * std::sin(t)}, orientation);
}

Region ellipse_to_polygon(const Ellipse& e, int n_vertices) {
    if (!(e.semi_major > 0.0) || !(e.semi_minor > 0.0))
        throw DegenerateShapeError("ellipse semi-axes must be positive");
    if (n_vertices < 3) throw DegenerateShapeError("ellipse polygonization needs at least 3 vertices");
    Ring ring;
    ring.reserve(n_vertices);
    for (int k = 0; k < n_vertices; ++k) ring.push_back(e.point_at(2.0 * M_PI * k / n_vertices));
    return Region::from_ring(std::move(ring));
}

Region Region::from_ring(Ring ring) {
    if (signed_area(ring) < 0) std::reverse(ring.begin(), ring.end());
    Region r;
    r.polygons.push_back({std::move(ring), {}});
    return r;
}

// ---------------------------------------------------------------------------
// Booleans

Region region_intersect(const Region& a, const Region& b) {
    if (a.empty() || b.empty()) return {};
    return boolean_op(a, b, cl::ctIntersection, "intersection");
}

Region region_union(const Region& a, const Region& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return boolean_op(a, b, cl::ctUnion, "union");
}

Region region_difference(const Region& a, const Region& b) {
    if (a.empty() || b.empty()) return a;
    return boolean_op(a, b, cl::ctDifference, "difference");
}

Region region_union_all(std::span<const Region> regions) {
    Region probe;
    for (const auto& r : regions) probe.polygons.insert(probe.polygons.end(), r.polygons.begin(), r.polygons.end());
    if (probe.empty()) return {};
    const double scale = lattice_scale(probe, Region{});
    cl::Clipper c;
    c.StrictlySimple(true);
    cl::PolyTree tree;
    try {
        for (const auto& r : regions) c.AddPaths(to_paths(r, scale), cl::ptSubject, true);
        if (!c.Execute(cl::ctUnion, tree, cl::pftNonZero, cl::pftNonZero)) throw Error("clipper reported failure");
    } catch (const cl::clipperException& e) {
        throw Error(std::string("polygon union failed: ") + e.what());
    }
    Region out;
    for (const cl::PolyNode* outer : tree.Childs) collect(*outer, scale, out);
    return out;
}

// ---------------------------------------------------------------------------
// Area

double area(const Region& r, const DensityField& density) {
    if (density.is_uniform()) {
        double s = 0.0;
        for (const auto& pwh : r.polygons) {
            s += std::abs(signed_area(pwh.outer));
            for (const auto& h : pwh.holes) s -= std::abs(signed_area(h));
        }
        return density.uniform_value() * s;
    }
    if (r.empty()) return 0.0;

    // The bilinear interpolant is a polynomial in {1, x, y, xy} on every grid cell, including
    // the clamped half-infinite cells outside the sample lattice. Clip to each cell and
    // integrate the polynomial exactly.
    double bx0 = std::numeric_limits<double>::infinity(), by0 = bx0, bx1 = -bx0, by1 = -bx0;
    for (const auto& pwh : r.polygons) {
        for (const auto& p : pwh.outer) {
            bx0 = std::min(bx0, p.x);
            bx1 = std::max(bx1, p.x);
            by0 = std::min(by0, p.y);
            by1 = std::max(by1, p.y);
        }
    }

    const int nx = density.nx(), ny = density.ny();
    auto cell_range = [](double lo, double hi, double origin, double step, int n) {
        const int first = std::clamp(static_cast<int>(std::floor((lo - origin) / step)), -1, n - 1);
        const int last = std::clamp(static_cast<int>(std::floor((hi - origin) / step)), -1, n - 1);
        return std::make_pair(first, last);
    };
    const auto [i0, i1] = cell_range(bx0, bx1, density.x0(), density.dx(), nx);
    const auto [j0, j1] = cell_range(by0, by1, density.y0(), density.dy(), ny);

    double total = 0.0;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            // Cell bounds; outermost cells extend to the region's bounding box.
            const double cx0 = (i < 0) ? bx0 - 1.0 : density.x0() + i * density.dx();
            const double cx1 = (i >= nx - 1) ? bx1 + 1.0 : density.x0() + (i + 1) * density.dx();
            const double cy0 = (j < 0) ? by0 - 1.0 : density.y0() + j * density.dy();
            const double cy1 = (j >= ny - 1) ? by1 + 1.0 : density.y0() + (j + 1) * density.dy();
            const Region piece = region_intersect(r, Region::from_ring({{cx0, cy0}, {cx1, cy0}, {cx1, cy1}, {cx0, cy1}}));
            if (piece.empty()) continue;

            // phi = c00 + c10*x + c01*y + c11*xy within this cell.
            const int ia = std::clamp(i, 0, nx - 1), ib = std::clamp(i + 1, 0, nx - 1);
            const int ja = std::clamp(j, 0, ny - 1), jb = std::clamp(j + 1, 0, ny - 1);
            const double f00 = density(Point{density.x0() + ia * density.dx(), density.y0() + ja * density.dy()});
            const double f10 = density(Point{density.x0() + ib * density.dx(), density.y0() + ja * density.dy()});
            const double f01 = density(Point{density.x0() + ia * density.dx(), density.y0() + jb * density.dy()});
            const double f11 = density(Point{density.x0() + ib * density.dx(), density.y0() + jb * density.dy()});
            const bool vary_x = ia != ib, vary_y = ja != jb;
            const double xa = density.x0() + ia * density.dx();
            const double ya = density.y0() + ja * density.dy();
            // Local coordinates s = (x - xa)/dx, t = (y - ya)/dy when the field varies.
            const double sx = vary_x ? 1.0 / density.dx() : 0.0;
            const double sy = vary_y ? 1.0 / density.dy() : 0.0;
            // phi = f00 + (f10-f00) s + (f01-f00) t + (f11-f10-f01+f00) s t
            const double A = f00, Bs = f10 - f00, Ct = f01 - f00, Dst = f11 - f10 - f01 + f00;
            // s = sx (x - xa), t = sy (y - ya)
            const double c00 = A - Bs * sx * xa - Ct * sy * ya + Dst * sx * sy * xa * ya;
            const double c10 = Bs * sx - Dst * sx * sy * ya;
            const double c01 = Ct * sy - Dst * sx * sy * xa;
            const double c11 = Dst * sx * sy;

            // Outer rings are counter-clockwise and holes clockwise, so signed moments
            // already subtract the holes.
            for (const auto& pwh : piece.polygons) {
                auto add = [&](const Ring& ring) {
                    const Moments m = ring_moments(ring);
                    total += c00 * m.m1 + c10 * m.mx + c01 * m.my + c11 * m.mxy;
                };
                add(pwh.outer);
                for (const auto& h : pwh.holes) add(h);
            }
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Containment

bool contains(const Ellipse& e, Point p, Boundary mode) {
    const double q = e.quadratic_form(p);
    return mode == Boundary::Strict ? q < 1.0 : q <= 1.0;
}

namespace {

double segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

Point segment_closest(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return a + t * ab;
}

constexpr int kOnBoundary = std::numeric_limits<int>::min();

// kOnBoundary within tol of an edge, otherwise the winding number.
int winding(const Ring& ring, Point p, double tol) {
    int wn = 0;
    const std::size_t n = ring.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point a = ring[k], b = ring[(k + 1) % n];
        if (segment_distance(p, a, b) <= tol) return kOnBoundary;
        if (a.y <= p.y) {
            if (b.y > p.y && cross(b - a, p - a) > 0) ++wn;
        } else if (b.y <= p.y && cross(b - a, p - a) < 0) {
            --wn;
        }
    }
    return wn;
}

}  // namespace

bool contains(const ConvexPolygon& poly, Point p, Boundary mode, double tol) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    bool on_boundary = false;
    for (std::size_t k = 0; k < n; ++k) {
        const Point a = v[k], b = v[(k + 1) % n];
        const Point e = b - a;
        const double side = cross(e, p - a) / norm(e);  // signed distance, positive inside
        if (side < -tol) return false;
        if (side <= tol) on_boundary = true;
    }
    return mode == Boundary::Inclusive || !on_boundary;
}

bool contains(const Region& r, Point p, Boundary mode, double tol) {
    for (const auto& pwh : r.polygons) {
        const int w = winding(pwh.outer, p, tol);
        if (w == kOnBoundary) {
            if (mode == Boundary::Inclusive) return true;
            continue;
        }
        if (w == 0) continue;
        bool in_hole = false;
        for (const auto& h : pwh.holes) {
            const int wh = winding(h, p, tol);
            if (wh == kOnBoundary) {
                if (mode == Boundary::Inclusive) return true;
                in_hole = true;
                break;
            }
            if (wh != 0) {
                in_hole = true;
                break;
            }
        }
        if (!in_hole) return true;
    }
    return false;
}

Point project_to_polygon(const ConvexPolygon& poly, Point p) {
    if (contains(poly, p, Boundary::Inclusive, 0.0)) return p;
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    Point best = v[0];
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        const Point c = segment_closest(p, v[k], v[(k + 1) % n]);
        const double d = norm(p - c);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// DensityField

DensityField DensityField::uniform(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) throw Error("density must be finite and non-negative");
    DensityField d;
    d.value_ = value;
    return d;
}

DensityField DensityField::grid(int nx, int ny, double x0, double y0, double dx, double dy,
                                std::vector<double> samples) {
    if (nx < 2 || ny < 2) throw Error("density grid needs at least 2x2 samples");
    if (!(dx > 0) || !(dy > 0)) throw Error("density grid spacing must be positive");
    if (samples.size() != static_cast<std::size_t>(nx) * ny)
        throw Error("density grid expects " + std::to_string(nx * ny) + " samples, got " +
                    std::to_string(samples.size()));
    for (double s : samples) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw Error("density samples must be finite and non-negative");
    }
    DensityField d;
    d.nx_ = nx;
    d.ny_ = ny;
    d.x0_ = x0;
    d.y0_ = y0;
    d.dx_ = dx;
    d.dy_ = dy;
    d.samples_ = std::move(samples);
    return d;
}

DensityField DensityField::parse(const std::string& text) {
    std::istringstream in(text);
    int nx = 0, ny = 0;
    double x0 = 0, y0 = 0, dx = 0, dy = 0;
    if (!(in >> nx >> ny >> x0 >> y0 >> dx >> dy)) throw Error("density grid: bad header, expected 'nx ny x0 y0 dx dy'");
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    if (!in.eof()) throw Error("density grid: non-numeric value in matrix");
    return grid(nx, ny, x0, y0, dx, dy, std::move(values));
}

DensityField DensityField::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open density grid file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

double DensityField::sample(int i, int j) const {
    i = std::clamp(i, 0, nx_ - 1);
    j = std::clamp(j, 0, ny_ - 1);
    return samples_[static_cast<std::size_t>(j) * nx_ + i];
}

double DensityField::operator()(Point p) const {
    if (is_uniform()) return value_;
    const double gx = std::clamp((p.x - x0_) / dx_, 0.0, double(nx_ - 1));
    const double gy = std::clamp((p.y - y0_) / dy_, 0.0, double(ny_ - 1));
    const int i = std::min(static_cast<int>(gx), nx_ - 2);
    const int j = std::min(static_cast<int>(gy), ny_ - 2);
    const double s = gx - i, t = gy - j;
    return (1 - s) * (1 - t) * sample(i, j) + s * (1 - t) * sample(i + 1, j) + (1 - s) * t * sample(i, j + 1) +
           s * t * sample(i + 1, j + 1);
}

double DensityField::line_integral(double y, double xa, double xb) const {
    if (xb <= xa) return 0.0;
    if (is_uniform()) return value_ * (xb - xa);
    // Piecewise linear in x with kinks at sample columns; trapezoid is exact per piece.
    std::vector<double> knots{xa};
    const int first = std::max(0, static_cast<int>(std::ceil((xa - x0_) / dx_)));
    for (int i = first; i < nx_; ++i) {
        const double xk = x0_ + i * dx_;
        if (xk >= xb) break;
        if (xk > xa) knots.push_back(xk);
    }
    knots.push_back(xb);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        total += 0.5 * (knots[k + 1] - knots[k]) * ((*this)(Point{knots[k], y}) + (*this)(Point{knots[k + 1], y}));
    }
    return total;
}

}  // namespace ptzcov::geom2d
