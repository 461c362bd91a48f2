#include "ptzcov/diagnostics.hpp"

#include <cmath>

#include "ptzcov/control.hpp"
#include "ptzcov/objective.hpp"
#include "ptzcov/partition.hpp"

namespace ptzcov::sim {

const char* to_string(Component c) {
    switch (c) {
        case Component::Qx: return "qx";
        case Component::Qy: return "qy";
        case Component::Z: return "z";
        case Component::Theta: return "theta";
        case Component::H: return "h";
        case Component::Delta: return "delta";
    }
    return "?";
}

double& coordinate(AgentState& s, Component c) {
    switch (c) {
        case Component::Qx: return s.q.x;
        case Component::Qy: return s.q.y;
        case Component::Z: return s.z;
        case Component::Theta: return s.theta;
        case Component::H: return s.h;
        case Component::Delta: return s.delta;
    }
    return s.z;
}

double component(const control::ControlInput& u, Component c) {
    switch (c) {
        case Component::Qx: return u.u_q.x;
        case Component::Qy: return u.u_q.y;
        case Component::Z: return u.u_z;
        case Component::Theta: return u.u_theta;
        case Component::H: return u.u_h;
        case Component::Delta: return u.u_delta;
    }
    return 0.0;
}

std::vector<GradientEntry> check_gradients(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                                           const ConvexPolygon& omega, const DensityField& density,
                                           const GradientCheckOptions& opts) {
    const auto part = partition::compute_partition(states, lims, omega, {opts.polygonization, opts.eps_f});
    const control::Snapshot snap{states, lims, &omega, &density, opts.eps_f};

    std::vector<GradientEntry> out;
    std::vector<AgentState> work(states.begin(), states.end());
    for (int i = 0; i < static_cast<int>(states.size()); ++i) {
        const auto grad = control::objective_gradient(i, snap, part, {opts.boundary_samples});
        for (Component c : kComponents) {
            double& x = coordinate(work[i], c);
            const double x0 = x;
            x = x0 + opts.fd_step;
            const double hp = objective::objective_grid_oracle(work, lims, omega, density, opts.oracle_resolution);
            x = x0 - opts.fd_step;
            const double hm = objective::objective_grid_oracle(work, lims, omega, density, opts.oracle_resolution);
            x = x0;

            GradientEntry e;
            e.agent = i;
            e.component = c;
            e.analytic = component(grad, c);
            e.finite_difference = (hp - hm) / (2.0 * opts.fd_step);
            const double err = std::abs(e.analytic - e.finite_difference);
            e.pass = err <= opts.abs_tol || err <= opts.rel_tol * std::abs(e.finite_difference);
            out.push_back(e);
        }
    }
    return out;
}

}  // namespace ptzcov::sim
