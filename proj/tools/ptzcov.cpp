// Command-line front end: run, compare, check-gradients, oracle.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "ptzcov/diagnostics.hpp"
#include "ptzcov/objective.hpp"
#include "ptzcov/output.hpp"
#include "ptzcov/runner.hpp"
#include "ptzcov/scenario.hpp"

namespace {

using namespace ptzcov;

constexpr const char* kOutEnv = "PTZCOV_OUT_DIR";

struct Common {
    std::string scenario;
    double dt = 0.0;
    int steps = -1;
    int polygonization = 0;
    int boundary_samples = 0;
    std::uint64_t seed = 0;
    bool adaptive_dt = false;

    void add_to(CLI::App* app) {
        app->add_option("scenario", scenario, "Scenario YAML file")->required()->check(CLI::ExistingFile);
        app->add_option("--dt", dt, "Time step")->check(CLI::PositiveNumber);
        app->add_option("--steps", steps, "Number of steps")->check(CLI::NonNegativeNumber);
        app->add_option("--polygonization", polygonization, "Ellipse polygon vertex count")->check(CLI::Range(8, 1 << 16));
        app->add_option("--boundary-samples", boundary_samples, "Boundary quadrature samples")
            ->check(CLI::Range(64, 1 << 20));
        app->add_option("--seed", seed, "Seed for randomized initial conditions and samples");
        app->add_flag("--adaptive-dt", adaptive_dt, "Halve dt within a step while H would decrease (floor 1e-6)");
    }

    sim::Overrides overrides(const CLI::App* app) const {
        sim::Overrides ov;
        if (app->count("--dt")) ov.dt = dt;
        if (app->count("--steps")) ov.steps = steps;
        if (app->count("--polygonization")) ov.polygonization = polygonization;
        if (app->count("--boundary-samples")) ov.boundary_samples = boundary_samples;
        if (app->count("--seed")) ov.seed = seed;
        if (adaptive_dt) ov.adaptive_dt = true;
        return ov;
    }
};

std::string resolve_out(const CLI::App* app, const std::string& flag_value) {
    if (app->count("--out")) return flag_value;
    if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
    return flag_value;
}

void report_run(const sim::RunLog& log, const std::string& dir) {
    const auto& last = log.records.back();
    fmt::print("{} [{}]: {} steps, H {:.10g} -> {:.10g}, monotonicity violations {}, converged {}, {:.2f} s\n",
               log.scenario.name, sim::to_string(log.scenario.mode), log.scenario.steps, log.records.front().report.H,
               last.report.H, log.monotonicity_violations, log.converged ? "yes" : "no", last.wall_seconds);
    for (const auto& w : log.warnings) fmt::print(stderr, "warning: {}\n", w);
    fmt::print("outputs written to {}\n", dir);
}

int cmd_run(const Common& c, const CLI::App* app, const std::string& out_flag) {
    const auto s = sim::load_scenario(c.scenario, c.overrides(app));
    const auto log = sim::run(s);
    const std::string dir = resolve_out(app, out_flag);
    sim::emit_outputs(log, dir);
    report_run(log, dir);
    return 0;
}

int cmd_compare(const Common& c, const CLI::App* app, const std::string& out_flag) {
    auto ov = c.overrides(app);
    ov.mode = sim::Mode::PTZ;
    const auto ptz = sim::run(sim::load_scenario(c.scenario, ov));
    ov.mode = sim::Mode::FixedCamera;
    const auto fixed = sim::run(sim::load_scenario(c.scenario, ov));

    const std::filesystem::path dir = resolve_out(app, out_flag);
    sim::emit_outputs(ptz, (dir / "ptz").string());
    sim::emit_outputs(fixed, (dir / "fixed").string());
    report_run(ptz, (dir / "ptz").string());
    report_run(fixed, (dir / "fixed").string());

    const double hp = ptz.records.back().report.H, hf = fixed.records.back().report.H;
    const nlohmann::json cmp = {{"ptz_final_H", hp}, {"fixed_final_H", hf}, {"ratio", hp / hf}, {"ptz_higher", hp > hf}};
    std::ofstream(dir / "compare.json") << cmp.dump(2) << "\n";
    fmt::print("final H: ptz {:.10g}, fixed {:.10g}, ratio {:.4f}\n", hp, hf, hp / hf);
    return 0;
}

int cmd_check_gradients(const Common& c, const CLI::App* app, int samples, int resolution) {
    const auto s = sim::load_scenario(c.scenario, c.overrides(app));
    const auto lims = s.limits();
    sim::GradientCheckOptions opts;
    opts.oracle_resolution = resolution;
    opts.polygonization = s.polygonization;
    opts.boundary_samples = s.boundary_samples;
    opts.eps_f = s.eps_f;

    // Sample 0 is the scenario's own initial configuration; the rest are seeded draws.
    std::mt19937_64 rng(s.seed);
    int failures = 0;
    fmt::print("sample,agent,component,analytic,finite_difference,pass\n");
    for (int k = 0; k < samples; ++k) {
        std::vector<sim::AgentState> states = s.initial_states();
        if (k > 0) {
            for (std::size_t i = 0; i < states.size(); ++i) states[i] = sim::random_state(s.omega, lims[i], rng);
        }
        for (const auto& e : sim::check_gradients(states, lims, s.omega, s.density, opts)) {
            fmt::print("{},{},{},{:.10e},{:.10e},{}\n", k, e.agent, sim::to_string(e.component), e.analytic,
                       e.finite_difference, e.pass ? "yes" : "no");
            if (!e.pass) ++failures;
        }
    }
    if (failures > 0) {
        fmt::print(stderr, "{} gradient components outside tolerance\n", failures);
        return 1;
    }
    return 0;
}

int cmd_oracle(const Common& c, const CLI::App* app, int resolution) {
    const auto s = sim::load_scenario(c.scenario, c.overrides(app));
    const auto states = s.initial_states();
    const auto ev = sim::evaluate(s, states);
    const double oracle =
        objective::objective_grid_oracle(states, s.limits(), s.omega, s.density, resolution);
    const double rel = std::abs(ev.report.H - oracle) / std::max(std::abs(oracle), 1e-300);
    fmt::print("partition H: {:.12g}\noracle H:    {:.12g}\nrelative difference: {:.3e}\n", ev.report.H, oracle, rel);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage control simulator for pan-tilt-zoom camera swarms"};
    app.require_subcommand(1);

    Common run_c, cmp_c, grad_c, oracle_c;
    std::string run_out = "out", cmp_out = "out";
    int samples = 20, grad_resolution = 1024, oracle_resolution = 1024;

    auto* run = app.add_subcommand("run", "Simulate a scenario and write logs");
    run_c.add_to(run);
    run->add_option("--out", run_out, std::string("Output directory (default: $") + kOutEnv + " or ./out)");

    auto* cmp = app.add_subcommand("compare", "Run PTZ and fixed-camera modes from the same initial conditions");
    cmp_c.add_to(cmp);
    cmp->add_option("--out", cmp_out, std::string("Output directory (default: $") + kOutEnv + " or ./out)");

    auto* grad = app.add_subcommand("check-gradients", "Compare control components with oracle finite differences");
    grad_c.add_to(grad);
    grad->add_option("--samples", samples, "Number of configurations")->check(CLI::PositiveNumber);
    grad->add_option("--resolution", grad_resolution, "Oracle scanline count")->check(CLI::Range(32, 1 << 20));

    auto* orc = app.add_subcommand("oracle", "Print partition-based and oracle H for the initial configuration");
    oracle_c.add_to(orc);
    orc->add_option("--resolution", oracle_resolution, "Oracle scanline count")->check(CLI::Range(32, 1 << 20));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_c, run, run_out);
        if (*cmp) return cmd_compare(cmp_c, cmp, cmp_out);
        if (*grad) return cmd_check_gradients(grad_c, grad, samples, grad_resolution);
        if (*orc) return cmd_oracle(oracle_c, orc, oracle_resolution);
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 1;
}
