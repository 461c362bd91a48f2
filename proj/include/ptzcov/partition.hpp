#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ptzcov/geom2d.hpp"
#include "ptzcov/sensing.hpp"

namespace ptzcov::partition {

using geom2d::ConvexPolygon;
using geom2d::Region;
using sensing::AgentLimits;
using sensing::AgentState;

inline constexpr double kDefaultEpsF = 1e-9;

/// Overlap of guaranteed regions of agents whose qualities agree within eps_f.
struct CommonRegion {
    double quality = 0.0;      // largest member quality
    std::vector<int> agents;   // connected group, ascending
    Region region;
};

struct Partition {
    std::vector<Region> cells;                 // W_i
    std::vector<CommonRegion> common;          // W_c^l
    Region neutral;                            // O
    std::vector<std::vector<int>> neighbors;   // N_i, ascending
    std::vector<double> qualities;             // f_i used for the split
    std::vector<Region> guaranteed;            // polygonized C_i^gs clipped to Omega
};

struct PartitionOptions {
    int polygonization = geom2d::kDefaultPolygonization;
    double eps_f = kDefaultEpsF;
};

Partition compute_partition(std::span<const AgentState> states, std::span<const AgentLimits> lims,
                            const ConvexPolygon& omega, const PartitionOptions& opts = {});

/// Sum of cell, common and neutral areas minus area(Omega); zero for an exact tiling.
double tiling_defect(const Partition& p, const ConvexPolygon& omega);

}  // namespace ptzcov::partition
