#include "ptzcov/sensing.hpp"

#include <cmath>
#include <string>

namespace ptzcov::sensing {

namespace {

void require_elliptical(double h, double delta) {
    if (!(delta > 0.0) || !(delta < M_PI / 2))
        throw DomainError("half view-angle must lie in (0, pi/2), got " + std::to_string(delta));
    if (!(std::abs(h) < M_PI / 2 - delta))
        throw DomainError("tilt " + std::to_string(h) + " outside the elliptical regime |h| < pi/2 - delta");
}

double sec2(double x) {
    const double c = std::cos(x);
    return 1.0 / (c * c);
}

}  // namespace

AgentLimits AgentLimits::make(double z_min, double z_max, double delta_min, double delta_max, double r,
                              std::optional<double> h_max) {
    AgentLimits l;
    l.z_min = z_min;
    l.z_max = z_max;
    l.delta_min = delta_min;
    l.delta_max = delta_max;
    l.r = r;
    l.h_max = h_max.value_or(M_PI / 2 - delta_max);
    return l;
}

void AgentLimits::validate() const {
    if (!(z_min > 0.0)) throw Error("z_min must be positive");
    if (!(z_min < z_max)) throw Error("z_min must be strictly below z_max");
    if (!(delta_min > 0.0)) throw Error("delta_min must be positive");
    if (!(delta_min < delta_max)) throw Error("delta_min must be strictly below delta_max");
    if (!(delta_max < M_PI / 2)) throw Error("delta_max must be below 90 degrees");
    if (!(h_max > 0.0)) throw Error("h_max must be positive");
    if (h_max > M_PI / 2 - delta_max + 1e-12) throw Error("h_max must not exceed 90 degrees minus delta_max");
    if (!(r >= 0.0)) throw Error("uncertainty radius r must be non-negative");
    if (!(r < z_min * std::tan(delta_min)))
        throw Error("uncertainty radius r must be strictly below z_min * tan(delta_min) = " +
                    std::to_string(z_min * std::tan(delta_min)));
}

bool AgentLimits::admits(const AgentState& s, double tol) const {
    return s.z >= z_min - tol && s.z <= z_max + tol && std::abs(s.h) < h_max && s.delta >= delta_min - tol &&
           s.delta <= delta_max + tol && std::abs(s.r - r) <= tol;
}

double quality_term(double x, double lo, double hi) {
    const double L2 = (hi - lo) * (hi - lo);
    const double d = x - lo;
    const double g = d * d - L2;
    return g * g / (L2 * L2);
}

double quality_term_derivative(double x, double lo, double hi) {
    const double L2 = (hi - lo) * (hi - lo);
    const double d = x - lo;
    return 4.0 * d * (d * d - L2) / (L2 * L2);
}

PatternShape pattern_shape(double z, double h, double delta) {
    require_elliptical(h, delta);
    const double tp = std::tan(h + delta), tm = std::tan(h - delta);
    const double s = 0.5 * (tp + tm);
    return {0.5 * z * (tp - tm), z * std::tan(delta) * std::sqrt(1.0 + s * s), z * s};
}

PatternShapeDerivatives pattern_shape_derivatives(double z, double h, double delta) {
    require_elliptical(h, delta);
    const double tp = std::tan(h + delta), tm = std::tan(h - delta);
    const double sp = sec2(h + delta), sm = sec2(h - delta);
    const double s = 0.5 * (tp + tm);
    const double root = std::sqrt(1.0 + s * s);
    const double td = std::tan(delta);

    PatternShapeDerivatives d;
    d.dz = {0.5 * (tp - tm), td * root, s};

    const double ds_dh = 0.5 * (sp + sm);
    d.dh = {0.5 * z * (sp - sm), z * td * s * ds_dh / root, z * ds_dh};

    const double ds_dd = 0.5 * (sp - sm);
    d.ddelta = {0.5 * z * (sp + sm), z * sec2(delta) * root + z * td * s * ds_dd / root, z * ds_dd};
    return d;
}

Ellipse sensing_pattern(const AgentState& s) {
    const PatternShape p = pattern_shape(s.z, s.h, s.delta);
    if (p.a < p.b * (1.0 - 1e-12))
        throw DomainError("semi-major axis below semi-minor axis; state outside the elliptical regime");
    const Point w{std::cos(s.theta), std::sin(s.theta)};
    return {s.q + p.offset * w, p.a, p.b, s.theta};
}

std::optional<Ellipse> guaranteed_region(const AgentState& s) {
    Ellipse e = sensing_pattern(s);
    if (s.r == 0.0) return e;
    if (s.r >= std::min(e.semi_major, e.semi_minor)) return std::nullopt;
    e.semi_major -= s.r;
    e.semi_minor -= s.r;
    return e;
}

QualityValue quality(const AgentState& s, const AgentLimits& lims) {
    QualityValue v;
    v.f = (quality_term(s.z, lims.z_min, lims.z_max) + quality_term(s.h, 0.0, lims.h_max) +
           quality_term(s.delta, lims.delta_min, lims.delta_max)) /
          3.0;
    v.df_dz = quality_term_derivative(s.z, lims.z_min, lims.z_max) / 3.0;
    v.df_dh = quality_term_derivative(s.h, 0.0, lims.h_max) / 3.0;
    v.df_ddelta = quality_term_derivative(s.delta, lims.delta_min, lims.delta_max) / 3.0;
    return v;
}

Point boundary_point(const AgentState& s, double t) {
    const auto e = guaranteed_region(s);
    if (!e) throw DegenerateShapeError("guaranteed region is empty");
    return e->point_at(t);
}

BoundaryJacobians boundary_jacobians(const AgentState& s, double t) {
    const PatternShape p = pattern_shape(s.z, s.h, s.delta);
    const double A = p.a - s.r, B = p.b - s.r;
    if (!(A > 0.0) || !(B > 0.0)) throw DegenerateShapeError("guaranteed region is empty");
    const PatternShapeDerivatives d = pattern_shape_derivatives(s.z, s.h, s.delta);

    const double ct = std::cos(t), st = std::sin(t);
    const Point w{std::cos(s.theta), std::sin(s.theta)};
    const Point w_perp{-w.y, w.x};
    auto local = [&](double da, double db) { return geom2d::rotate({da * ct, db * st}, s.theta); };

    BoundaryJacobians j;
    j.u = Mat2{};
    j.v = local(d.dz.a, d.dz.b) + d.dz.offset * w;
    j.sigma = local(d.dh.a, d.dh.b) + d.dh.offset * w;
    j.mu = local(d.ddelta.a, d.ddelta.b) + d.ddelta.offset * w;
    // d/dtheta R(theta) x = R(theta + pi/2) x
    j.tau = geom2d::rotate({A * ct, B * st}, s.theta + M_PI / 2) + p.offset * w_perp;

    const Point grad = geom2d::rotate({ct / A, st / B}, s.theta);
    j.normal = (1.0 / geom2d::norm(grad)) * grad;
    j.speed = std::hypot(A * st, B * ct);
    return j;
}

}  // namespace ptzcov::sensing
