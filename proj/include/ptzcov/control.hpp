#pragma once

#include <span>
#include <vector>

#include "ptzcov/geom2d.hpp"
#include "ptzcov/partition.hpp"
#include "ptzcov/sensing.hpp"

namespace ptzcov::control {

using geom2d::ConvexPolygon;
using geom2d::DensityField;
using geom2d::Point;
using partition::Partition;
using sensing::AgentLimits;
using sensing::AgentState;

struct ControlInput {
    Point u_q;
    double u_z = 0.0;
    double u_theta = 0.0;
    double u_h = 0.0;
    double u_delta = 0.0;

    double norm() const;
};

struct Gains {
    double q = 1.0, z = 1.0, theta = 1.0, h = 1.0, delta = 1.0;
    void validate() const;
};

enum class ArcKind { OutsideOmega, FreeArc, DominatedByNeighbor, Suppressed };

struct Classification {
    ArcKind kind = ArcKind::FreeArc;
    int neighbor = -1;             // set for DominatedByNeighbor
    double neighbor_quality = 0.0; // best covering quality F

    bool same_arc(const Classification& o) const { return kind == o.kind && neighbor == o.neighbor; }
};

struct BoundarySample {
    double t = 0.0;
    Point point;
    Point normal;
    Classification classification;
    double arc_weight = 0.0;  // |d gamma/dt| * dt
};

/// Per-step snapshot shared by every agent's control computation.
struct Snapshot {
    std::span<const AgentState> states;
    std::span<const AgentLimits> lims;
    const ConvexPolygon* omega = nullptr;
    const DensityField* density = nullptr;
    double eps_f = partition::kDefaultEpsF;
};

Classification classify_boundary(int agent, double t, const Snapshot& snap);

/// Uniform boundary samples of agent i's guaranteed region with their classification.
std::vector<BoundarySample> boundary_samples(int agent, const Snapshot& snap, int samples);

struct ControlOptions {
    int boundary_samples = 360;
};

/// Raw gradient of H with respect to agent i's state (gains not applied).
ControlInput objective_gradient(int agent, const Snapshot& snap, const Partition& part,
                                const ControlOptions& opts = {});

/// Gain-scaled gradient control for agent i.
ControlInput control_input(int agent, const Snapshot& snap, const Partition& part, const Gains& gains,
                           const ControlOptions& opts = {});

struct ProjectionOptions {
    double eps_h = 1e-6;
};

/// Explicit Euler step followed by projection onto the agent's feasible set.
AgentState project_state(const AgentState& s, const ControlInput& u, double dt, const AgentLimits& lims,
                         const ConvexPolygon& omega, const ProjectionOptions& opts = {});

/// Finite-difference velocity of project_state: the control that survives the constraints.
ControlInput projected_velocity(const AgentState& s, const ControlInput& u, double dt, const AgentLimits& lims,
                                const ConvexPolygon& omega, const ProjectionOptions& opts = {});

}  // namespace ptzcov::control
