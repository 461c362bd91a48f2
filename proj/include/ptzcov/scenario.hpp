#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ptzcov/control.hpp"
#include "ptzcov/geom2d.hpp"
#include "ptzcov/sensing.hpp"

namespace ptzcov::sim {

using geom2d::ConvexPolygon;
using geom2d::DensityField;
using sensing::AgentLimits;
using sensing::AgentState;

/// Scenario parse or validation failure; the message names the offending field.
class ScenarioError : public Error {
public:
    using Error::Error;
};

enum class Mode { PTZ, FixedCamera };

const char* to_string(Mode m);

struct AgentSpec {
    AgentState initial;
    AgentLimits limits;
};

struct Scenario {
    std::string name = "scenario";
    ConvexPolygon omega{geom2d::Ring{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    DensityField density = DensityField::uniform(1.0);
    std::vector<AgentSpec> agents;
    control::Gains gains;
    double dt = 0.01;
    int steps = 100;
    int polygonization = geom2d::kDefaultPolygonization;
    int boundary_samples = 360;
    double eps_f = 1e-9;
    Mode mode = Mode::PTZ;
    std::uint64_t seed = 0;

    // Runner behaviour.
    bool adaptive_dt = false;
    double dt_floor = 1e-6;
    double convergence_threshold = 1e-4;
    double eps_h = 1e-6;
    std::vector<int> snapshot_steps;

    std::vector<AgentState> initial_states() const;
    std::vector<AgentLimits> limits() const;
};

/// Throws ScenarioError naming the first violated invariant.
void validate(const Scenario& s);

/// Command-line replacements for document values, applied before random agents are drawn.
struct Overrides {
    std::optional<double> dt;
    std::optional<int> steps;
    std::optional<int> polygonization;
    std::optional<int> boundary_samples;
    std::optional<std::uint64_t> seed;
    std::optional<bool> adaptive_dt;
    std::optional<Mode> mode;
};

/// Parses a YAML scenario document. Angles in the document are degrees. Relative
/// density-grid paths resolve against base_dir.
Scenario parse_scenario(const std::string& text, const std::string& base_dir = ".", const Overrides& ov = {});
Scenario load_scenario(const std::string& path, const Overrides& ov = {});

/// Initial state drawn uniformly inside the limits with q uniform in Omega. The tilt
/// stays clear of its bounds by `h_margin` radians.
AgentState random_state(const ConvexPolygon& omega, const AgentLimits& lims, std::mt19937_64& rng,
                        double h_margin = 0.05);

/// FixedCamera mode pins the camera downward at the widest-quality zoom.
AgentState fixed_camera_state(const AgentState& s, const AgentLimits& lims);

}  // namespace ptzcov::sim
