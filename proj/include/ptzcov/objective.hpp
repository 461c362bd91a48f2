#pragma once

#include <span>
#include <vector>

#include "ptzcov/geom2d.hpp"
#include "ptzcov/partition.hpp"
#include "ptzcov/sensing.hpp"

namespace ptzcov::objective {

using geom2d::ConvexPolygon;
using geom2d::DensityField;
using partition::Partition;
using sensing::AgentLimits;
using sensing::AgentState;

struct ObjectiveReport {
    double H = 0.0;
    std::vector<double> per_agent;   // ∫_{W_i} f_i φ
    std::vector<double> per_common;  // ∫_{W_c^l} f^l φ
    double neutral_area = 0.0;       // ∫_O φ
};

/// Coverage-quality objective summed over the partition. Quality is uniform on each
/// cell, so every term is f times the density mass of its region.
ObjectiveReport objective_from_partition(const Partition& p, std::span<const double> qualities,
                                         const DensityField& density);

/// Brute-force evaluation of H = ∫_Ω max_i f_i 1[q ∈ C_i^gs] φ(q) dq that shares no
/// geometry with the polygon path. Ω is swept by `resolution` horizontal scanlines; on
/// each line the covered intervals are found from the exact ellipse equations and the
/// pointwise maximum quality is integrated exactly in x. Scanline heights follow a
/// cosine spacing between the y-levels where the integrand is not smooth (ellipse
/// tangents, ellipse/ellipse and ellipse/Ω crossings, Ω vertices), so the result is a
/// smooth function of the agent states.
double objective_grid_oracle(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                             const ConvexPolygon& omega, const DensityField& density, int resolution);

/// Plain cell-center sampling on a resolution x resolution lattice over Ω's bounding box.
/// Piecewise constant in the states; a coarse cross-check of the scanline oracle.
double objective_point_samples(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                               const ConvexPolygon& omega, const DensityField& density, int resolution);

}  // namespace ptzcov::objective
