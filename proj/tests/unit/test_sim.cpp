#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ptzcov/output.hpp"
#include "ptzcov/runner.hpp"
#include "support.hpp"

using namespace ptzcov;
using namespace ptzcov::sim;
using testing::kDeg;

namespace {

const std::string kScenarios = PTZCOV_SCENARIO_DIR;

// Small square workspace with two downward agents; quick to simulate.
std::string small_doc(const std::string& extra_agent_line = "", const std::string& r = "0.02") {
    return R"(name: small
omega: [[-3, -3], [3, -3], [3, 3], [-3, 3]]
dt: 0.01
steps: 30
polygonization: 64
gains: {q: 1, z: 0.5, theta: 0.1, h: 1, delta: 1}
snapshot_steps: [0, 30]
limits: {z_min: 0.3, z_max: 1.5, delta_min: 15, delta_max: 35, h_max: 50, r: )" +
           r + R"(}
agents:
  - {x: -0.4, y: 0.0, z: 0.8, theta: 10, h: 4, delta: 20}
  - {x: 0.5, y: 0.2, z: 0.9, theta: 200, h: -3, delta: 18}
)" + extra_agent_line;
}

std::string read(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ptzcov_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("bundled case1 loads with the case-study limits") {
    const auto s = load_scenario(kScenarios + "/case1.yaml");
    REQUIRE(s.agents.size() == 3);
    for (const auto& a : s.agents) {
        CHECK(a.limits.z_min == 0.3);
        CHECK(a.limits.z_max == 3.8);
        CHECK(a.limits.delta_min == doctest::Approx(15 * kDeg).epsilon(1e-15));
        CHECK(a.limits.delta_max == doctest::Approx(35 * kDeg).epsilon(1e-15));
        CHECK(a.limits.h_max == doctest::Approx(50 * kDeg).epsilon(1e-15));
    }
    const auto s2 = load_scenario(kScenarios + "/case2.yaml");
    CHECK(s2.agents.size() == 6);
    CHECK(s2.agents[0].limits.z_max == 1.8);
}

TEST_CASE("scenario validation errors name the field") {
    auto expect_error = [](const std::string& doc, const std::string& field) {
        try {
            parse_scenario(doc);
            FAIL("no error for " << field);
        } catch (const ScenarioError& e) {
            CHECK(std::string(e.what()).find(field) != std::string::npos);
        }
    };
    // r equal to z_min tan(delta_min) is rejected: the rule is strict.
    const double r_edge = 0.3 * std::tan(15 * kDeg);
    std::ostringstream r;
    r.precision(17);
    r << r_edge;
    expect_error(small_doc("", r.str()), "limits");
    expect_error(small_doc("  - {x: 9.0, y: 0.0, z: 0.8}\n"), "agents[2].q");
    expect_error(small_doc("  - {x: 0.0, y: 0.0, z: 5.0}\n"), "agents[2].z");
    expect_error(small_doc("  - {x: 0.0, y: 0.0, z: 1.0, h: 60}\n"), "agents[2].h");
    expect_error(small_doc("  - {y: 0.0, z: 1.0}\n"), "agents[2].x");
    expect_error("name: [unclosed", "parse error");
    std::string no_dt = small_doc();
    no_dt.replace(no_dt.find("dt: 0.01"), 8, "dt: -1.0");
    expect_error(no_dt, "dt");
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.yaml"), ScenarioError);
}

TEST_CASE("overrides replace document values") {
    Overrides ov;
    ov.dt = 0.005;
    ov.steps = 7;
    ov.polygonization = 32;
    ov.boundary_samples = 90;
    ov.seed = 99;
    const auto s = parse_scenario(small_doc(), ".", ov);
    CHECK(s.dt == 0.005);
    CHECK(s.steps == 7);
    CHECK(s.polygonization == 32);
    CHECK(s.boundary_samples == 90);
    CHECK(s.seed == 99);
    CHECK(s.snapshot_steps == std::vector<int>{0});
}

TEST_CASE("random agents are reproducible from the seed") {
    const std::string doc = R"(omega: [[-3, -3], [3, -3], [3, 3], [-3, 3]]
seed: 5
limits: {z_min: 0.3, z_max: 1.5, delta_min: 15, delta_max: 35, h_max: 50, r: 0.02}
random_agents: {count: 4}
)";
    const auto a = parse_scenario(doc), b = parse_scenario(doc);
    Overrides ov;
    ov.seed = 6;
    const auto c = parse_scenario(doc, ".", ov);
    REQUIRE(a.agents.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.agents[i].initial.q == b.agents[i].initial.q);
        CHECK(a.agents[i].initial.h == b.agents[i].initial.h);
    }
    CHECK_FALSE(a.agents[0].initial.q == c.agents[0].initial.q);
}

TEST_CASE("zero-step run holds only the initial record") {
    Overrides ov;
    ov.steps = 0;
    const auto s = parse_scenario(small_doc(), ".", ov);
    const auto log = run(s);
    REQUIRE(log.records.size() == 1);
    const auto ev = evaluate(s, s.initial_states());
    CHECK(log.records[0].report.H == ev.report.H);
}

TEST_CASE("short run: feasibility, bookkeeping and monotone H") {
    const auto s = parse_scenario(small_doc());
    const auto log = run(s);
    REQUIRE(log.records.size() == static_cast<std::size_t>(s.steps + 1));
    CHECK(log.monotonicity_violations == 0);
    for (const auto& r : log.records) {
        CHECK(std::abs(r.areas.defect) <= 1e-6 * s.omega.area());
        for (std::size_t i = 0; i < r.states.size(); ++i) {
            CHECK(s.agents[i].limits.admits(r.states[i]));
            CHECK(geom2d::contains(s.omega, r.states[i].q));
        }
    }
    CHECK(log.records.back().report.H > log.records.front().report.H);
}

TEST_CASE("fixed-camera mode keeps the camera pinned") {
    Overrides ov;
    ov.mode = Mode::FixedCamera;
    const auto s = parse_scenario(small_doc(), ".", ov);
    const auto log = run(s);
    for (const auto& r : log.records) {
        for (std::size_t i = 0; i < r.states.size(); ++i) {
            CHECK(r.states[i].h == 0.0);
            CHECK(r.states[i].delta == s.agents[i].limits.delta_min);
            CHECK(r.states[i].theta == s.agents[i].initial.theta);
            CHECK(r.controls[i].u_theta == 0.0);
            CHECK(r.controls[i].u_h == 0.0);
            CHECK(r.controls[i].u_delta == 0.0);
        }
    }
}

TEST_CASE("adaptive step halving never lets H drop") {
    Overrides ov;
    ov.dt = 0.5;  // far too large for a fixed step
    ov.adaptive_dt = true;
    const auto s = parse_scenario(small_doc(), ".", ov);
    const auto log = run(s);
    CHECK(log.monotonicity_violations == 0);
    bool halved = false;
    for (std::size_t k = 0; k + 1 < log.records.size(); ++k) halved |= log.records[k].dt_used < s.dt;
    CHECK(halved);
}

TEST_CASE("fully dominated agent is reported") {
    // Agent 2 sits inside agent 0's footprint; its own limits leave it with a lower quality.
    const auto s = parse_scenario(small_doc(
        "  - {x: -0.4, y: 0.0, z: 0.49, delta: 16, limits: {z_max: 0.5, delta_max: 16, h_max: 50}}\n"));
    REQUIRE(sensing::quality(s.agents[2].initial, s.agents[2].limits).f <
            sensing::quality(s.agents[0].initial, s.agents[0].limits).f);
    const auto log = run(s);
    bool found = false;
    for (const auto& w : log.warnings) found |= w.find("agent 2") != std::string::npos;
    CHECK(found);
}

TEST_CASE("outputs: files, row counts and partition consistency") {
    const auto s = parse_scenario(small_doc());
    const auto log = run(s);
    const auto dir = temp_dir("outputs");
    emit_outputs(log, dir.string());

    const std::string traj = read(dir / "trajectories.csv");
    CHECK(traj.rfind("step,agent,x,y,z,theta,h,delta\n", 0) == 0);
    const auto lines = std::count(traj.begin(), traj.end(), '\n');
    CHECK(lines == 1 + (s.steps + 1) * static_cast<long>(s.agents.size()));

    const std::string obj = read(dir / "objective.csv");
    CHECK(obj.rfind("step,H,H_0,H_1,neutral_area\n", 0) == 0);
    CHECK(std::count(obj.begin(), obj.end(), '\n') == 1 + s.steps + 1);

    const auto summary = nlohmann::json::parse(read(dir / "summary.json"));
    CHECK(summary["monotonicity_violations"] == 0);
    CHECK(summary["final_configuration"].size() == 2);
    CHECK(summary.contains("converged"));

    // Ring areas of the step-0 snapshot reproduce the logged areas.
    const auto part = nlohmann::json::parse(read(dir / "partition_0.json"));
    auto ring_area = [](const nlohmann::json& ring) {
        geom2d::Ring r;
        for (const auto& p : ring) r.push_back({p[0].get<double>(), p[1].get<double>()});
        return geom2d::signed_area(r);
    };
    auto region_area = [&](const nlohmann::json& region) {
        double a = 0.0;
        for (const auto& poly : region["polygons"]) {
            a += ring_area(poly["outer"]);
            for (const auto& h : poly["holes"]) a += ring_area(h);
        }
        return a;
    };
    const auto& rec = log.records.front();
    for (std::size_t i = 0; i < rec.areas.cells.size(); ++i) {
        CHECK(std::abs(region_area(part["cells"][i]) - rec.areas.cells[i]) <= 1e-9);
    }
    CHECK(std::abs(region_area(part["neutral"]) - rec.report.neutral_area) <= 1e-9);
    CHECK(std::filesystem::exists(dir / "partition_30.json"));
}

TEST_CASE("identical runs give byte-identical files") {
    const auto s = parse_scenario(small_doc());
    const auto a = temp_dir("det_a"), b = temp_dir("det_b");
    emit_outputs(run(s), a.string());
    emit_outputs(run(s), b.string());
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
        CHECK(read(entry.path()) == read(b / entry.path().filename()));
    }
}
