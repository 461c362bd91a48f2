#pragma once

#include <optional>

#include "ptzcov/geom2d.hpp"

namespace ptzcov::sensing {

using geom2d::Ellipse;
using geom2d::Point;

/// Full per-agent state. theta is the pan (pattern orientation), h the tilt,
/// delta the half view-angle. Angles in radians.
struct AgentState {
    Point q;
    double z = 1.0;
    double theta = 0.0;
    double h = 0.0;
    double delta = 0.0;
    double r = 0.0;
};

struct AgentLimits {
    double z_min = 0.0, z_max = 1.0;
    double delta_min = 0.0, delta_max = 0.0;
    double h_max = 0.0;  // tilt is confined to the open interval (-h_max, h_max)
    double r = 0.0;

    /// Limits with h_max defaulted to pi/2 - delta_max.
    static AgentLimits make(double z_min, double z_max, double delta_min, double delta_max, double r,
                            std::optional<double> h_max = std::nullopt);

    /// Throws ptzcov::Error naming the first violated constraint.
    void validate() const;
    bool admits(const AgentState& s, double tol = 1e-12) const;
};

struct QualityValue {
    double f = 0.0;
    double df_dz = 0.0;
    double df_dh = 0.0;
    double df_ddelta = 0.0;
};

/// The quartic p(x) = ((x - lo)^2 - L^2)^2 / L^4 with L = hi - lo, and its derivative.
double quality_term(double x, double lo, double hi);
double quality_term_derivative(double x, double lo, double hi);

/// Closed-form pattern geometry: semi-axes before uncertainty shrinkage and the
/// signed center offset along w = (cos theta, sin theta).
struct PatternShape {
    double a = 0.0;
    double b = 0.0;
    double offset = 0.0;
};

struct PatternShapeDerivatives {
    PatternShape dz, dh, ddelta;
};

PatternShape pattern_shape(double z, double h, double delta);
PatternShapeDerivatives pattern_shape_derivatives(double z, double h, double delta);

Ellipse sensing_pattern(const AgentState& s);

/// Concentric ellipse with semi-axes (a - r, b - r); nullopt when r >= min(a, b).
std::optional<Ellipse> guaranteed_region(const AgentState& s);

QualityValue quality(const AgentState& s, const AgentLimits& lims);

/// gamma(t) = q_c + R(theta) ((a - r) cos t, (b - r) sin t) on the guaranteed-region boundary.
Point boundary_point(const AgentState& s, double t);

struct Mat2 {
    double m00 = 1, m01 = 0, m10 = 0, m11 = 1;
    Point operator*(Point v) const { return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; }
};

/// Derivatives of gamma(t) with respect to each state coordinate, the outward unit
/// normal and the parametric speed |d gamma / dt|.
struct BoundaryJacobians {
    Mat2 u;        // d gamma / d q
    Point v;       // d gamma / d z
    Point tau;     // d gamma / d theta
    Point sigma;   // d gamma / d h
    Point mu;      // d gamma / d delta
    Point normal;
    double speed = 0.0;
};

BoundaryJacobians boundary_jacobians(const AgentState& s, double t);

}  // namespace ptzcov::sensing
