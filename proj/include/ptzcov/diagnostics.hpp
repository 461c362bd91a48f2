#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ptzcov/scenario.hpp"

namespace ptzcov::sim {

/// State coordinates in ControlInput order.
enum class Component { Qx, Qy, Z, Theta, H, Delta };
inline constexpr std::array<Component, 6> kComponents{Component::Qx, Component::Qy, Component::Z,
                                                      Component::Theta, Component::H, Component::Delta};
const char* to_string(Component c);

double& coordinate(AgentState& s, Component c);
double component(const control::ControlInput& u, Component c);

struct GradientCheckOptions {
    int oracle_resolution = 1024;
    double fd_step = 1e-4;
    double rel_tol = 0.02;
    double abs_tol = 1e-4;
    int polygonization = 256;
    int boundary_samples = 360;
    double eps_f = 1e-9;
};

struct GradientEntry {
    int agent = 0;
    Component component = Component::Qx;
    double analytic = 0.0;  // control component divided by its gain
    double finite_difference = 0.0;
    bool pass = false;
};

/// Compares every control component (gain removed) with central differences of the
/// scanline oracle.
std::vector<GradientEntry> check_gradients(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                                           const ConvexPolygon& omega, const DensityField& density,
                                           const GradientCheckOptions& opts = {});

}  // namespace ptzcov::sim
