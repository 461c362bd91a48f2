#include "ptzcov/control.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace ptzcov::control {

double ControlInput::norm() const {
    return std::sqrt(u_q.x * u_q.x + u_q.y * u_q.y + u_z * u_z + u_theta * u_theta + u_h * u_h +
                     u_delta * u_delta);
}

void Gains::validate() const {
    for (double k : {q, z, theta, h, delta}) {
        if (!(k > 0.0) || !std::isfinite(k)) throw Error("control gains must be positive and finite");
    }
}

namespace {

// Per-snapshot cache of guaranteed regions and qualities.
struct Context {
    const Snapshot& snap;
    std::vector<std::optional<geom2d::Ellipse>> regions;
    std::vector<double> f;

    explicit Context(const Snapshot& s) : snap(s) {
        if (s.states.size() != s.lims.size()) throw Error("control: states and limits differ in length");
        if (s.omega == nullptr || s.density == nullptr) throw Error("control: snapshot lacks omega or density");
        regions.reserve(s.states.size());
        f.reserve(s.states.size());
        for (std::size_t i = 0; i < s.states.size(); ++i) {
            regions.push_back(sensing::guaranteed_region(s.states[i]));
            f.push_back(sensing::quality(s.states[i], s.lims[i]).f);
        }
    }

    Classification classify(int i, Point p) const {
        if (!geom2d::contains(*snap.omega, p, geom2d::Boundary::Inclusive)) return {ArcKind::OutsideOmega, -1, 0.0};
        int best = -1;
        double F = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(regions.size()); ++j) {
            if (j == i || !regions[j]) continue;
            if (f[j] > F && geom2d::contains(*regions[j], p)) {
                F = f[j];
                best = j;
            }
        }
        if (best < 0) return {ArcKind::FreeArc, -1, 0.0};
        if (F > f[i] + snap.eps_f) return {ArcKind::Suppressed, best, F};
        return {ArcKind::DominatedByNeighbor, best, F};
    }

    Classification classify_t(int i, double t) const { return classify(i, regions[i]->point_at(t)); }

    double weight(int i, const Classification& c) const {
        switch (c.kind) {
            case ArcKind::FreeArc: return f[i];
            case ArcKind::DominatedByNeighbor: return f[i] - c.neighbor_quality;
            default: return 0.0;
        }
    }
};

// (J n) phi |gamma'| for q (2 entries), z, theta, h, delta.
using Integrand = std::array<double, 6>;

Integrand base_integrand(const AgentState& s, double t, const DensityField& density, Point p) {
    const auto j = sensing::boundary_jacobians(s, t);
    const double scale = density(p) * j.speed;
    const Point un = j.u * j.normal;
    return {un.x * scale,
            un.y * scale,
            geom2d::dot(j.v, j.normal) * scale,
            geom2d::dot(j.tau, j.normal) * scale,
            geom2d::dot(j.sigma, j.normal) * scale,
            geom2d::dot(j.mu, j.normal) * scale};
}

void accumulate(Integrand& acc, const Integrand& g, double w) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += w * g[k];
}

constexpr double kTwoPi = 2.0 * M_PI;

double wrap_two_pi(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0.0 ? t + kTwoPi : t;
}

// Appends every t in [0, 2pi) where g changes sign. g is a trigonometric polynomial of
// degree at most two, so dense sampling brackets all crossings except those hidden
// inside a dip between samples; sampled extrema are refined to catch those.
template <typename G>
void sign_changes(const G& g, std::vector<double>& out) {
    constexpr int N = 256;
    constexpr double h = kTwoPi / N;
    std::array<double, N> v;
    for (int k = 0; k < N; ++k) v[k] = g(h * k);

    auto bisect = [&](double a, double b) {
        const bool side = g(a) > 0.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (a + b);
            ((g(mid) > 0.0) == side ? a : b) = mid;
        }
        return wrap_two_pi(0.5 * (a + b));
    };

    for (int k = 0; k < N; ++k) {
        const int k1 = (k + 1) % N;
        if ((v[k] > 0.0) != (v[k1] > 0.0)) out.push_back(bisect(h * k, h * (k + 1)));
    }
    for (int k = 0; k < N; ++k) {
        const double prev = v[(k + N - 1) % N], next = v[(k + 1) % N];
        const bool dip = v[k] > 0.0 && v[k] <= prev && v[k] <= next;
        const bool bump = v[k] <= 0.0 && v[k] >= prev && v[k] >= next;
        if (!dip && !bump) continue;
        const double sgn = dip ? 1.0 : -1.0;
        double a = h * (k - 1), b = h * (k + 1);
        constexpr double r = 0.6180339887498949;
        double x1 = b - r * (b - a), x2 = a + r * (b - a);
        double g1 = sgn * g(x1), g2 = sgn * g(x2);
        for (int it = 0; it < 60; ++it) {
            if (g1 < g2) {
                b = x2;
                x2 = x1;
                g2 = g1;
                x1 = b - r * (b - a);
                g1 = sgn * g(x1);
            } else {
                a = x1;
                x1 = x2;
                g1 = g2;
                x2 = a + r * (b - a);
                g2 = sgn * g(x2);
            }
        }
        const double tm = 0.5 * (a + b);
        if ((g(tm) > 0.0) == (v[k] > 0.0)) continue;
        out.push_back(bisect(h * (k - 1), tm));
        out.push_back(bisect(tm, h * (k + 1)));
    }
}

// Parameters on agent i's guaranteed boundary where membership in a neighbor's region
// or in a half-plane of omega changes.
void crossing_parameters(int i, const Context& ctx, std::vector<double>& out) {
    const auto& e = *ctx.regions[i];
    for (int j = 0; j < static_cast<int>(ctx.regions.size()); ++j) {
        if (j == i || !ctx.regions[j]) continue;
        const auto& o = *ctx.regions[j];
        if (geom2d::norm(e.center - o.center) > e.semi_major + o.semi_major) continue;
        sign_changes([&](double t) { return o.quadratic_form(e.point_at(t)) - 1.0; }, out);
    }
    // n . (gamma(t) - a) = K + P cos t + Q sin t for each side a -> b.
    const Point U = geom2d::rotate({e.semi_major, 0.0}, e.orientation);
    const Point V = geom2d::rotate({0.0, e.semi_minor}, e.orientation);
    const auto& vs = ctx.snap.omega->vertices();
    for (std::size_t k = 0; k < vs.size(); ++k) {
        const Point a = vs[k], d = vs[(k + 1) % vs.size()] - a;
        const Point n{d.y, -d.x};
        const double K = geom2d::dot(n, e.center - a), P = geom2d::dot(n, U), Q = geom2d::dot(n, V);
        const double R = std::hypot(P, Q);
        if (!(R > 0.0) || std::abs(K) >= R) continue;
        const double psi = std::atan2(Q, P), spread = std::acos(-K / R);
        out.push_back(wrap_two_pi(psi + spread));
        out.push_back(wrap_two_pi(psi - spread));
    }
}

}  // namespace

Classification classify_boundary(int agent, double t, const Snapshot& snap) {
    Context ctx(snap);
    if (!ctx.regions.at(agent)) throw DegenerateShapeError("classify_boundary: guaranteed region is empty");
    return ctx.classify_t(agent, t);
}

std::vector<BoundarySample> boundary_samples(int agent, const Snapshot& snap, int samples) {
    Context ctx(snap);
    if (!ctx.regions.at(agent)) return {};
    std::vector<BoundarySample> out;
    out.reserve(samples);
    const double dt = 2.0 * M_PI / samples;
    for (int k = 0; k < samples; ++k) {
        const double t = dt * k;
        const auto j = sensing::boundary_jacobians(snap.states[agent], t);
        BoundarySample s;
        s.t = t;
        s.point = ctx.regions[agent]->point_at(t);
        s.normal = j.normal;
        s.classification = ctx.classify(agent, s.point);
        s.arc_weight = j.speed * dt;
        out.push_back(s);
    }
    return out;
}

ControlInput objective_gradient(int agent, const Snapshot& snap, const Partition& part, const ControlOptions& opts) {
    if (opts.boundary_samples < 64) throw Error("control: at least 64 boundary samples required");
    Context ctx(snap);
    ControlInput out;
    if (!ctx.regions.at(agent)) return out;

    const AgentState& s = snap.states[agent];
    const auto& ellipse = *ctx.regions[agent];
    const int M = opts.boundary_samples;
    const double step = 2.0 * M_PI / M;

    auto integrand = [&](double t) {
        const Point p = ellipse.point_at(t);
        return base_integrand(s, t, *snap.density, p);
    };

    // Nodes: the uniform grid plus every parameter where the boundary crosses a neighbor's
    // region or a side of omega, so each interval lies on a single arc.
    std::vector<double> ts(M);
    for (int k = 0; k < M; ++k) ts[k] = step * k;
    crossing_parameters(agent, ctx, ts);
    std::sort(ts.begin(), ts.end());
    std::vector<double> nodes;
    nodes.reserve(ts.size() + 1);
    for (double t : ts) {
        if (nodes.empty() || t - nodes.back() > 1e-13) nodes.push_back(t);
    }
    if (kTwoPi - nodes.back() <= 1e-13) nodes.pop_back();

    std::vector<Integrand> base(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) base[k] = integrand(nodes[k]);

    // Trapezoid rule per interval, weighted by the arc classification at its midpoint.
    Integrand acc{};
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const std::size_t k1 = (k + 1) % nodes.size();
        const double ta = nodes[k], tb = (k1 == 0) ? kTwoPi : nodes[k1];
        const double w = ctx.weight(agent, ctx.classify_t(agent, 0.5 * (ta + tb)));
        if (w == 0.0) continue;
        accumulate(acc, base[k], 0.5 * (tb - ta) * w);
        accumulate(acc, base[k1], 0.5 * (tb - ta) * w);
    }

    // Interior terms: quality is uniform on W_i, so ∫_{W_i} ∂f/∂x φ = ∂f/∂x · mass(W_i).
    const auto qv = sensing::quality(s, snap.lims[agent]);
    const double mass = geom2d::area(part.cells.at(agent), *snap.density);

    out.u_q = {acc[0], acc[1]};
    out.u_z = acc[2] + qv.df_dz * mass;
    out.u_theta = acc[3];
    out.u_h = acc[4] + qv.df_dh * mass;
    out.u_delta = acc[5] + qv.df_ddelta * mass;
    return out;
}

ControlInput control_input(int agent, const Snapshot& snap, const Partition& part, const Gains& gains,
                           const ControlOptions& opts) {
    ControlInput g = objective_gradient(agent, snap, part, opts);
    g.u_q = gains.q * g.u_q;
    g.u_z *= gains.z;
    g.u_theta *= gains.theta;
    g.u_h *= gains.h;
    g.u_delta *= gains.delta;
    return g;
}

AgentState project_state(const AgentState& s, const ControlInput& u, double dt, const AgentLimits& lims,
                         const ConvexPolygon& omega, const ProjectionOptions& opts) {
    if (!(dt > 0.0)) throw Error("project_state: dt must be positive");
    AgentState n = s;
    n.q = geom2d::project_to_polygon(omega, s.q + dt * u.u_q);
    n.z = std::clamp(s.z + dt * u.u_z, lims.z_min, lims.z_max);
    n.theta = std::remainder(s.theta + dt * u.u_theta, 2.0 * M_PI);
    const double h_lim = lims.h_max - opts.eps_h;
    n.h = std::clamp(s.h + dt * u.u_h, -h_lim, h_lim);
    n.delta = std::clamp(s.delta + dt * u.u_delta, lims.delta_min, lims.delta_max);
    return n;
}

ControlInput projected_velocity(const AgentState& s, const ControlInput& u, double dt, const AgentLimits& lims,
                                const ConvexPolygon& omega, const ProjectionOptions& opts) {
    const AgentState n = project_state(s, u, dt, lims, omega, opts);
    ControlInput v;
    v.u_q = (1.0 / dt) * (n.q - s.q);
    v.u_z = (n.z - s.z) / dt;
    v.u_theta = u.u_theta;
    v.u_h = (n.h - s.h) / dt;
    v.u_delta = (n.delta - s.delta) / dt;
    return v;
}

}  // namespace ptzcov::control
