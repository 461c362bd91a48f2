#include "ptzcov/output.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>

namespace ptzcov::sim {

namespace {

nlohmann::json ring_to_json(const geom2d::Ring& ring) {
    auto out = nlohmann::json::array();
    for (const auto& p : ring) out.push_back({p.x, p.y});
    return out;
}

nlohmann::json state_to_json(const AgentState& s) {
    return {{"x", s.q.x}, {"y", s.q.y}, {"z", s.z}, {"theta", s.theta}, {"h", s.h}, {"delta", s.delta}, {"r", s.r}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << content;
    if (!f) throw Error("write failed: " + path.string());
}

}  // namespace

nlohmann::json region_to_json(const geom2d::Region& r) {
    auto polys = nlohmann::json::array();
    for (const auto& p : r.polygons) {
        auto holes = nlohmann::json::array();
        for (const auto& h : p.holes) holes.push_back(ring_to_json(h));
        polys.push_back({{"outer", ring_to_json(p.outer)}, {"holes", holes}});
    }
    return {{"polygons", polys}};
}

nlohmann::json partition_to_json(const Partition& p, int step) {
    auto cells = nlohmann::json::array();
    for (const auto& c : p.cells) cells.push_back(region_to_json(c));
    auto common = nlohmann::json::array();
    for (const auto& c : p.common) {
        common.push_back({{"quality", c.quality}, {"agents", c.agents}, {"region", region_to_json(c.region)}});
    }
    return {{"step", step},
            {"qualities", p.qualities},
            {"cells", cells},
            {"common", common},
            {"neutral", region_to_json(p.neutral)}};
}

nlohmann::json summary_json(const RunLog& log) {
    const Scenario& s = log.scenario;
    const StepRecord& first = log.records.front();
    const StepRecord& last = log.records.back();
    auto agents = nlohmann::json::array();
    for (const auto& st : last.states) agents.push_back(state_to_json(st));
    double max_defect = 0.0;
    for (const auto& r : log.records) max_defect = std::max(max_defect, std::abs(r.areas.defect));
    return {{"scenario", s.name},
            {"mode", to_string(s.mode)},
            {"agents", s.agents.size()},
            {"steps", s.steps},
            {"dt", s.dt},
            {"polygonization", s.polygonization},
            {"boundary_samples", s.boundary_samples},
            {"initial_H", first.report.H},
            {"final_H", last.report.H},
            {"final_configuration", agents},
            {"final_max_control_norm", last.max_control_norm},
            {"converged", log.converged},
            {"convergence_threshold", s.convergence_threshold},
            {"monotonicity_violations", log.monotonicity_violations},
            {"max_tiling_defect", max_defect},
            {"warnings", log.warnings}};
}

std::string trajectories_csv(const RunLog& log) {
    std::string out = "step,agent,x,y,z,theta,h,delta\n";
    for (const auto& r : log.records) {
        for (std::size_t i = 0; i < r.states.size(); ++i) {
            const auto& s = r.states[i];
            out += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.step, i, s.q.x, s.q.y, s.z,
                               s.theta, s.h, s.delta);
        }
    }
    return out;
}

std::string objective_csv(const RunLog& log) {
    const std::size_t n = log.scenario.agents.size();
    std::string out = "step,H";
    for (std::size_t i = 0; i < n; ++i) out += fmt::format(",H_{}", i);
    out += ",neutral_area\n";
    for (const auto& r : log.records) {
        out += fmt::format("{},{:.17g}", r.step, r.report.H);
        for (double t : r.report.per_agent) out += fmt::format(",{:.17g}", t);
        out += fmt::format(",{:.17g}\n", r.report.neutral_area);
    }
    return out;
}

void emit_outputs(const RunLog& log, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
    const fs::path root(dir);
    write_file(root / "trajectories.csv", trajectories_csv(log));
    write_file(root / "objective.csv", objective_csv(log));
    for (const auto& [step, p] : log.snapshots) {
        write_file(root / fmt::format("partition_{}.json", step), partition_to_json(p, step).dump(1) + "\n");
    }
    write_file(root / "summary.json", summary_json(log).dump(2) + "\n");
}

}  // namespace ptzcov::sim
