#include "ptzcov/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ptzcov::objective {

ObjectiveReport objective_from_partition(const Partition& p, std::span<const double> qualities,
                                         const DensityField& density) {
    if (qualities.size() != p.cells.size()) throw Error("objective_from_partition: one quality per cell expected");
    ObjectiveReport r;
    r.per_agent.reserve(p.cells.size());
    for (std::size_t i = 0; i < p.cells.size(); ++i) {
        r.per_agent.push_back(qualities[i] * geom2d::area(p.cells[i], density));
        r.H += r.per_agent.back();
    }
    for (const auto& c : p.common) {
        r.per_common.push_back(c.quality * geom2d::area(c.region, density));
        r.H += r.per_common.back();
    }
    r.neutral_area = geom2d::area(p.neutral, density);
    return r;
}

namespace {

// Oracle-local ellipse: everything below is derived from the implicit equation
// u^2/A^2 + v^2/B^2 <= 1 with (u, v) the rotated offsets from the center.
struct Conic {
    double cx, cy, A, B, c, s, f;

    double form(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double u = c * dx + s * dy, v = -s * dx + c * dy;
        return u * u / (A * A) + v * v / (B * B);
    }
    double half_height() const { return std::sqrt(A * A * s * s + B * B * c * c); }

    // Roots of the form along the line P + lambda * E.
    int line_roots(double px, double py, double ex, double ey, double out[2]) const {
        const double dx = px - cx, dy = py - cy;
        const double u0 = c * dx + s * dy, v0 = -s * dx + c * dy;
        const double u1 = c * ex + s * ey, v1 = -s * ex + c * ey;
        const double ia = 1.0 / (A * A), ib = 1.0 / (B * B);
        const double qa = u1 * u1 * ia + v1 * v1 * ib;
        const double qb = 2.0 * (u0 * u1 * ia + v0 * v1 * ib);
        const double qc = u0 * u0 * ia + v0 * v0 * ib - 1.0;
        const double disc = qb * qb - 4.0 * qa * qc;
        if (qa <= 0.0 || disc < 0.0) return 0;
        const double sq = std::sqrt(disc);
        out[0] = (-qb - sq) / (2.0 * qa);
        out[1] = (-qb + sq) / (2.0 * qa);
        return 2;
    }

    double boundary_x(double t) const { return cx + c * A * std::cos(t) - s * B * std::sin(t); }
    double boundary_y(double t) const { return cy + s * A * std::cos(t) + c * B * std::sin(t); }
};

std::vector<Conic> build_conics(std::span<const AgentState> states, std::span<const AgentLimits> lims) {
    if (states.size() != lims.size()) throw Error("oracle: states and limits differ in length");
    std::vector<Conic> out;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto e = sensing::guaranteed_region(states[i]);
        if (!e) continue;
        const double f = sensing::quality(states[i], lims[i]).f;
        out.push_back({e->center.x, e->center.y, e->semi_major, e->semi_minor, std::cos(e->orientation),
                       std::sin(e->orientation), f});
    }
    return out;
}

std::pair<double, double> omega_row(const ConvexPolygon& omega, double y, bool& hit) {
    const auto& v = omega.vertices();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto p = v[k], q = v[(k + 1) % v.size()];
        if ((y < p.y && y < q.y) || (y > p.y && y > q.y)) continue;
        if (p.y == q.y) {
            lo = std::min({lo, p.x, q.x});
            hi = std::max({hi, p.x, q.x});
        } else {
            const double x = p.x + (y - p.y) / (q.y - p.y) * (q.x - p.x);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    hit = lo < hi;
    return {lo, hi};
}

// Exact ∫ max f φ dx along the scanline at height y.
double row_integral(const std::vector<Conic>& conics, const ConvexPolygon& omega, const DensityField& density,
                    double y, std::vector<double>& knots, std::vector<std::pair<double, double>>& chords) {
    bool hit = false;
    const auto [xl, xr] = omega_row(omega, y, hit);
    if (!hit) return 0.0;

    knots.clear();
    chords.clear();
    knots.push_back(xl);
    knots.push_back(xr);
    for (const auto& e : conics) {
        double roots[2];
        // Horizontal line through (0, y) with direction (1, 0): lambda is x directly.
        if (e.line_roots(0.0, y, 1.0, 0.0, roots) == 0) {
            chords.emplace_back(1.0, 0.0);
            continue;
        }
        const double a = std::max(roots[0], xl), b = std::min(roots[1], xr);
        chords.emplace_back(a, b);
        if (a < b) {
            knots.push_back(a);
            knots.push_back(b);
        }
    }
    std::sort(knots.begin(), knots.end());

    double total = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        const double a = knots[k], b = knots[k + 1];
        if (!(b > a)) continue;
        const double mid = 0.5 * (a + b);
        double best = 0.0;
        for (std::size_t m = 0; m < conics.size(); ++m) {
            if (chords[m].first <= mid && mid <= chords[m].second) best = std::max(best, conics[m].f);
        }
        if (best > 0.0) total += best * density.line_integral(y, a, b);
    }
    return total;
}

std::vector<double> breakpoints(const std::vector<Conic>& conics, const ConvexPolygon& omega) {
    const double y_lo = omega.min_y(), y_hi = omega.max_y();
    std::vector<double> ys{y_lo, y_hi};
    auto push = [&](double y) {
        if (y > y_lo && y < y_hi) ys.push_back(y);
    };
    const auto& v = omega.vertices();
    for (const auto& p : v) push(p.y);

    for (const auto& e : conics) {
        const double hh = e.half_height();
        push(e.cy - hh);
        push(e.cy + hh);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto p = v[k], q = v[(k + 1) % v.size()];
            double roots[2];
            if (e.line_roots(p.x, p.y, q.x - p.x, q.y - p.y, roots) == 0) continue;
            for (double lam : roots) {
                if (lam >= 0.0 && lam <= 1.0) push(p.y + lam * (q.y - p.y));
            }
        }
    }

    // Ellipse/ellipse crossings: sign changes of the other conic's form along this boundary.
    constexpr int kSamples = 1024;
    for (std::size_t i = 0; i < conics.size(); ++i) {
        for (std::size_t j = 0; j < conics.size(); ++j) {
            if (i == j) continue;
            const Conic& e = conics[i];
            const Conic& o = conics[j];
            auto g = [&](double t) { return o.form(e.boundary_x(t), e.boundary_y(t)) - 1.0; };
            double t0 = 0.0, g0 = g(t0);
            for (int k = 1; k <= kSamples; ++k) {
                const double t1 = 2.0 * M_PI * k / kSamples, g1 = g(t1);
                if ((g0 < 0.0) != (g1 < 0.0)) {
                    double a = t0, b = t1, ga = g0;
                    for (int it = 0; it < 80; ++it) {
                        const double m = 0.5 * (a + b), gm = g(m);
                        if ((gm < 0.0) == (ga < 0.0)) {
                            a = m;
                            ga = gm;
                        } else {
                            b = m;
                        }
                    }
                    push(e.boundary_y(0.5 * (a + b)));
                }
                t0 = t1;
                g0 = g1;
            }
        }
    }
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end(), [](double a, double b) { return b - a <= 1e-14 * (1.0 + std::abs(a)); }),
             ys.end());
    return ys;
}

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

}  // namespace

double objective_grid_oracle(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                             const ConvexPolygon& omega, const DensityField& density, int resolution) {
    if (resolution < 32) throw Error("oracle resolution must be at least 32");
    const auto conics = build_conics(states, lims);
    if (conics.empty()) return 0.0;

    const auto ys = breakpoints(conics, omega);
    const std::size_t slabs = ys.size() - 1;
    const int per_slab = std::max(8, static_cast<int>((resolution + slabs - 1) / slabs));

    std::vector<double> gl_x, gl_w;
    gauss_legendre(per_slab, gl_x, gl_w);

    std::vector<double> knots;
    std::vector<std::pair<double, double>> chords;
    double total = 0.0;
    for (std::size_t s = 0; s < slabs; ++s) {
        const double y0 = ys[s], y1 = ys[s + 1];
        const double half = 0.5 * (y1 - y0);
        // Gauss-Legendre in u with y = y0 + half (1 - cos u), u in [0, pi]: the substitution
        // turns square-root chord behaviour at the slab ends into an analytic integrand.
        for (int k = 0; k < per_slab; ++k) {
            const double u = 0.5 * M_PI * (gl_x[k] + 1.0);
            const double y = y0 + half * (1.0 - std::cos(u));
            const double w = half * std::sin(u) * 0.5 * M_PI * gl_w[k];
            total += w * row_integral(conics, omega, density, y, knots, chords);
        }
    }
    return total;
}

double objective_point_samples(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                               const ConvexPolygon& omega, const DensityField& density, int resolution) {
    if (resolution < 32) throw Error("oracle resolution must be at least 32");
    const auto conics = build_conics(states, lims);
    if (conics.empty()) return 0.0;
    const double x0 = omega.min_x(), y0 = omega.min_y();
    const double dx = (omega.max_x() - x0) / resolution, dy = (omega.max_y() - y0) / resolution;
    const auto& v = omega.vertices();
    double total = 0.0;
    for (int j = 0; j < resolution; ++j) {
        const double y = y0 + (j + 0.5) * dy;
        for (int i = 0; i < resolution; ++i) {
            const double x = x0 + (i + 0.5) * dx;
            bool inside = true;
            for (std::size_t k = 0; k < v.size() && inside; ++k) {
                const auto p = v[k], q = v[(k + 1) % v.size()];
                inside = (q.x - p.x) * (y - p.y) - (q.y - p.y) * (x - p.x) >= 0.0;
            }
            if (!inside) continue;
            double best = 0.0;
            for (const auto& e : conics) {
                if (e.form(x, y) <= 1.0) best = std::max(best, e.f);
            }
            if (best > 0.0) total += best * density(geom2d::Point{x, y}) * dx * dy;
        }
    }
    return total;
}

}  // namespace ptzcov::objective
