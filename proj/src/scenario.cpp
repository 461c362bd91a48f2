#include "ptzcov/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace ptzcov::sim {

namespace {

constexpr double kDeg = M_PI / 180.0;

template <typename T>
T get(const YAML::Node& node, const std::string& key, const std::string& where) {
    const YAML::Node v = node[key];
    if (!v) throw ScenarioError(where + key + ": missing");
    try {
        return v.as<T>();
    } catch (const YAML::Exception&) {
        throw ScenarioError(where + key + ": wrong type");
    }
}

template <typename T>
T get_or(const YAML::Node& node, const std::string& key, T fallback, const std::string& where) {
    if (!node[key]) return fallback;
    return get<T>(node, key, where);
}

AgentLimits parse_limits(const YAML::Node& node, const AgentLimits& base, const std::string& where) {
    AgentLimits l = base;
    if (!node) return l;
    if (!node.IsMap()) throw ScenarioError(where + "limits: expected a mapping");
    l.z_min = get_or(node, "z_min", l.z_min, where);
    l.z_max = get_or(node, "z_max", l.z_max, where);
    l.delta_min = get_or(node, "delta_min", l.delta_min / kDeg, where) * kDeg;
    l.delta_max = get_or(node, "delta_max", l.delta_max / kDeg, where) * kDeg;
    l.r = get_or(node, "r", l.r, where);
    if (node["h_max"]) l.h_max = get<double>(node, "h_max", where) * kDeg;
    else if (node["delta_max"]) l.h_max = M_PI / 2 - l.delta_max;
    return l;
}

}  // namespace

const char* to_string(Mode m) { return m == Mode::PTZ ? "ptz" : "fixed"; }

std::vector<AgentState> Scenario::initial_states() const {
    std::vector<AgentState> out;
    out.reserve(agents.size());
    for (const auto& a : agents) {
        out.push_back(mode == Mode::FixedCamera ? fixed_camera_state(a.initial, a.limits) : a.initial);
    }
    return out;
}

std::vector<AgentLimits> Scenario::limits() const {
    std::vector<AgentLimits> out;
    out.reserve(agents.size());
    for (const auto& a : agents) out.push_back(a.limits);
    return out;
}

AgentState fixed_camera_state(const AgentState& s, const AgentLimits& lims) {
    AgentState f = s;
    f.h = 0.0;
    f.delta = lims.delta_min;
    return f;
}

void validate(const Scenario& s) {
    if (!(s.dt > 0.0)) throw ScenarioError("dt: must be positive");
    if (s.steps < 0) throw ScenarioError("steps: must be non-negative");
    if (s.polygonization < 8) throw ScenarioError("polygonization: must be at least 8");
    if (s.boundary_samples < 64) throw ScenarioError("boundary_samples: must be at least 64");
    if (!(s.eps_f > 0.0)) throw ScenarioError("eps_f: must be positive");
    if (!(s.dt_floor > 0.0)) throw ScenarioError("dt_floor: must be positive");
    if (!(s.convergence_threshold > 0.0)) throw ScenarioError("convergence_threshold: must be positive");
    if (s.agents.empty()) throw ScenarioError("agents: at least one agent required");
    try {
        s.gains.validate();
    } catch (const Error& e) {
        throw ScenarioError(std::string("gains: ") + e.what());
    }
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
        const auto& a = s.agents[i];
        const std::string where = "agents[" + std::to_string(i) + "].";
        try {
            a.limits.validate();
        } catch (const ScenarioError&) {
            throw;
        } catch (const Error& e) {
            throw ScenarioError(where + "limits: " + e.what());
        }
        const AgentState& st = a.initial;
        if (std::abs(st.r - a.limits.r) > 0.0) throw ScenarioError(where + "r: state and limits disagree");
        if (st.z < a.limits.z_min || st.z > a.limits.z_max) throw ScenarioError(where + "z: outside [z_min, z_max]");
        if (!(std::abs(st.h) < a.limits.h_max)) throw ScenarioError(where + "h: outside (-h_max, h_max)");
        if (st.delta < a.limits.delta_min || st.delta > a.limits.delta_max)
            throw ScenarioError(where + "delta: outside [delta_min, delta_max]");
        if (!std::isfinite(st.theta)) throw ScenarioError(where + "theta: not finite");
        if (!geom2d::contains(s.omega, st.q)) throw ScenarioError(where + "q: footprint outside omega");
    }
    for (int k : s.snapshot_steps) {
        if (k < 0 || k > s.steps) throw ScenarioError("snapshot_steps: step " + std::to_string(k) + " out of range");
    }
}

Scenario parse_scenario(const std::string& text, const std::string& base_dir, const Overrides& ov) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ScenarioError(std::string("parse error: ") + e.what());
    }
    if (!root.IsMap()) throw ScenarioError("document: expected a mapping at top level");

    Scenario s;
    s.name = get_or<std::string>(root, "name", s.name, "");
    const std::string mode = get_or<std::string>(root, "mode", "ptz", "");
    if (mode == "ptz") s.mode = Mode::PTZ;
    else if (mode == "fixed") s.mode = Mode::FixedCamera;
    else throw ScenarioError("mode: expected 'ptz' or 'fixed', got '" + mode + "'");

    const YAML::Node omega = root["omega"];
    if (!omega || !omega.IsSequence()) throw ScenarioError("omega: expected a list of [x, y] vertices");
    geom2d::Ring ring;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const YAML::Node v = omega[k];
        if (!v.IsSequence() || v.size() != 2) throw ScenarioError("omega[" + std::to_string(k) + "]: expected [x, y]");
        ring.push_back({v[0].as<double>(), v[1].as<double>()});
    }
    try {
        s.omega = ConvexPolygon(std::move(ring));
    } catch (const Error& e) {
        throw ScenarioError(std::string("omega: ") + e.what());
    }

    if (const YAML::Node d = root["density"]) {
        try {
            if (d.IsScalar()) {
                s.density = DensityField::uniform(d.as<double>());
            } else if (d["uniform"]) {
                s.density = DensityField::uniform(d["uniform"].as<double>());
            } else if (d["grid"]) {
                std::filesystem::path p = d["grid"].as<std::string>();
                if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
                s.density = DensityField::load(p.string());
            } else {
                throw ScenarioError("density: expected a number, {uniform: v} or {grid: path}");
            }
        } catch (const ScenarioError&) {
            throw;
        } catch (const std::exception& e) {
            throw ScenarioError(std::string("density: ") + e.what());
        }
    }

    s.dt = get_or(root, "dt", s.dt, "");
    s.steps = get_or(root, "steps", s.steps, "");
    s.polygonization = get_or(root, "polygonization", s.polygonization, "");
    s.boundary_samples = get_or(root, "boundary_samples", s.boundary_samples, "");
    s.eps_f = get_or(root, "eps_f", s.eps_f, "");
    s.seed = get_or<std::uint64_t>(root, "seed", s.seed, "");
    s.adaptive_dt = get_or(root, "adaptive_dt", s.adaptive_dt, "");
    s.dt_floor = get_or(root, "dt_floor", s.dt_floor, "");
    s.convergence_threshold = get_or(root, "convergence_threshold", s.convergence_threshold, "");
    if (root["snapshot_steps"]) s.snapshot_steps = get<std::vector<int>>(root, "snapshot_steps", "");

    if (ov.dt) s.dt = *ov.dt;
    if (ov.steps) s.steps = *ov.steps;
    if (ov.polygonization) s.polygonization = *ov.polygonization;
    if (ov.boundary_samples) s.boundary_samples = *ov.boundary_samples;
    if (ov.seed) s.seed = *ov.seed;
    if (ov.adaptive_dt) s.adaptive_dt = *ov.adaptive_dt;
    if (ov.mode) s.mode = *ov.mode;
    // Snapshots past a shortened run are dropped rather than rejected.
    if (ov.steps) std::erase_if(s.snapshot_steps, [&](int k) { return k > s.steps; });

    if (const YAML::Node g = root["gains"]) {
        s.gains.q = get_or(g, "q", s.gains.q, "gains.");
        s.gains.z = get_or(g, "z", s.gains.z, "gains.");
        s.gains.theta = get_or(g, "theta", s.gains.theta, "gains.");
        s.gains.h = get_or(g, "h", s.gains.h, "gains.");
        s.gains.delta = get_or(g, "delta", s.gains.delta, "gains.");
    }

    if (!root["limits"]) throw ScenarioError("limits: missing");
    AgentLimits base;
    base.z_min = get<double>(root["limits"], "z_min", "limits.");
    base.z_max = get<double>(root["limits"], "z_max", "limits.");
    base.delta_min = get<double>(root["limits"], "delta_min", "limits.") * kDeg;
    base.delta_max = get<double>(root["limits"], "delta_max", "limits.") * kDeg;
    base.r = get_or(root["limits"], "r", 0.0, "limits.");
    base.h_max = root["limits"]["h_max"] ? get<double>(root["limits"], "h_max", "limits.") * kDeg
                                         : M_PI / 2 - base.delta_max;

    const YAML::Node agents = root["agents"];
    if (agents) {
        if (!agents.IsSequence()) throw ScenarioError("agents: expected a list");
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const YAML::Node a = agents[i];
            const std::string where = "agents[" + std::to_string(i) + "].";
            AgentSpec spec;
            spec.limits = parse_limits(a["limits"], base, where);
            spec.initial.q = {get<double>(a, "x", where), get<double>(a, "y", where)};
            spec.initial.z = get<double>(a, "z", where);
            spec.initial.theta = std::remainder(get_or(a, "theta", 0.0, where) * kDeg, 2.0 * M_PI);
            spec.initial.h = get_or(a, "h", 0.0, where) * kDeg;
            spec.initial.delta = get_or(a, "delta", spec.limits.delta_min / kDeg, where) * kDeg;
            spec.initial.r = spec.limits.r;
            s.agents.push_back(spec);
        }
    }
    if (const YAML::Node ra = root["random_agents"]) {
        const int count = get<int>(ra, "count", "random_agents.");
        if (count < 1) throw ScenarioError("random_agents.count: must be positive");
        std::mt19937_64 rng(s.seed);
        for (int i = 0; i < count; ++i) {
            AgentSpec spec;
            spec.limits = base;
            spec.initial = random_state(s.omega, base, rng);
            s.agents.push_back(spec);
        }
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::string& path, const Overrides& ov) {
    std::ifstream f(path);
    if (!f) throw ScenarioError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_scenario(ss.str(), std::filesystem::path(path).parent_path().string(), ov);
}

AgentState random_state(const ConvexPolygon& omega, const AgentLimits& lims, std::mt19937_64& rng,
                        double h_margin) {
    // Draw doubles from raw 64-bit output so the sequence is identical across standard libraries.
    auto uniform = [&rng](double lo, double hi) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    };
    AgentState s;
    do {
        s.q = {uniform(omega.min_x(), omega.max_x()), uniform(omega.min_y(), omega.max_y())};
    } while (!geom2d::contains(omega, s.q));
    s.z = uniform(lims.z_min, lims.z_max);
    s.theta = uniform(-M_PI, M_PI);
    const double h_lim = std::max(0.0, lims.h_max - h_margin);
    s.h = uniform(-h_lim, h_lim);
    s.delta = uniform(lims.delta_min, lims.delta_max);
    s.r = lims.r;
    return s;
}

}  // namespace ptzcov::sim
