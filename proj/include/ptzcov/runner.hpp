#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptzcov/control.hpp"
#include "ptzcov/objective.hpp"
#include "ptzcov/partition.hpp"
#include "ptzcov/scenario.hpp"

namespace ptzcov::sim {

using control::ControlInput;
using objective::ObjectiveReport;
using partition::Partition;

struct PartitionAreas {
    std::vector<double> cells;
    std::vector<double> common;
    double neutral = 0.0;
    double defect = 0.0;  // cells + common + neutral - area(Omega)
};

struct StepRecord {
    int step = 0;
    std::vector<AgentState> states;
    std::vector<ControlInput> controls;  // gain-scaled, evaluated at `states`
    ObjectiveReport report;
    PartitionAreas areas;
    double max_control_norm = 0.0;    // largest projected velocity norm over agents
    double dt_used = 0.0;             // step length that produced the next record
    double wall_seconds = 0.0;        // not written to files
};

struct RunLog {
    Scenario scenario;
    std::vector<StepRecord> records;
    std::map<int, Partition> snapshots;
    bool converged = false;
    int monotonicity_violations = 0;
    std::vector<std::string> warnings;
};

/// Relative tolerance of the monotonicity audit.
inline constexpr double kMonotonicityTolerance = 1e-9;

/// Everything derived from one configuration: partition, objective and the
/// gain-scaled controls of all agents.
struct Evaluation {
    Partition partition;
    ObjectiveReport report;
    std::vector<ControlInput> controls;
};

Evaluation evaluate(const Scenario& s, const std::vector<AgentState>& states);

/// Closed-loop simulation. Numeric failures are rethrown as Error carrying the step index.
RunLog run(const Scenario& s);

/// Steps k with H[k+1] < H[k] - tol |H[k]|.
int count_monotonicity_violations(const std::vector<StepRecord>& records, double tol = kMonotonicityTolerance);

}  // namespace ptzcov::sim
