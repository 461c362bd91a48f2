#include "ptzcov/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace ptzcov::sim {

namespace {

PartitionAreas areas_of(const Partition& p, const ConvexPolygon& omega) {
    PartitionAreas a;
    for (const auto& c : p.cells) a.cells.push_back(geom2d::area(c));
    for (const auto& c : p.common) a.common.push_back(geom2d::area(c.region));
    a.neutral = geom2d::area(p.neutral);
    a.defect = partition::tiling_defect(p, omega);
    return a;
}

double max_projected_norm(const Scenario& s, const std::vector<AgentState>& states,
                          const std::vector<ControlInput>& controls) {
    double m = 0.0;
    const control::ProjectionOptions popts{s.eps_h};
    for (std::size_t i = 0; i < states.size(); ++i) {
        const auto v = control::projected_velocity(states[i], controls[i], s.dt, s.agents[i].limits, s.omega, popts);
        m = std::max(m, v.norm());
    }
    return m;
}

}  // namespace

Evaluation evaluate(const Scenario& s, const std::vector<AgentState>& states) {
    const auto lims = s.limits();
    Evaluation e;
    e.partition = partition::compute_partition(states, lims, s.omega, {s.polygonization, s.eps_f});
    e.report = objective::objective_from_partition(e.partition, e.partition.qualities, s.density);

    const control::Snapshot snap{states, lims, &s.omega, &s.density, s.eps_f};
    const control::ControlOptions copts{s.boundary_samples};
    e.controls.reserve(states.size());
    for (int i = 0; i < static_cast<int>(states.size()); ++i) {
        ControlInput u = control::control_input(i, snap, e.partition, s.gains, copts);
        if (s.mode == Mode::FixedCamera) {
            u.u_theta = 0.0;
            u.u_h = 0.0;
            u.u_delta = 0.0;
        }
        e.controls.push_back(u);
    }
    return e;
}

int count_monotonicity_violations(const std::vector<StepRecord>& records, double tol) {
    int n = 0;
    for (std::size_t k = 1; k < records.size(); ++k) {
        const double h0 = records[k - 1].report.H, h1 = records[k].report.H;
        if (h1 - h0 < -tol * std::abs(h0)) ++n;
    }
    return n;
}

RunLog run(const Scenario& s) {
    validate(s);
    RunLog log;
    log.scenario = s;

    std::set<int> snaps(s.snapshot_steps.begin(), s.snapshot_steps.end());
    if (snaps.empty()) snaps = {0, s.steps};

    const auto lims = s.limits();
    const control::ProjectionOptions popts{s.eps_h};
    std::vector<AgentState> states = s.initial_states();
    std::vector<bool> warned(states.size(), false);

    using Clock = std::chrono::steady_clock;
    const auto t_start = Clock::now();

    int step = 0;
    try {
        Evaluation cur = evaluate(s, states);
        for (step = 0;; ++step) {
            StepRecord rec;
            rec.step = step;
            rec.states = states;
            rec.controls = cur.controls;
            rec.report = cur.report;
            rec.areas = areas_of(cur.partition, s.omega);
            rec.max_control_norm = max_projected_norm(s, states, cur.controls);

            std::vector<bool> shared(states.size(), false);
            for (const auto& c : cur.partition.common) {
                for (int j : c.agents) shared[j] = true;
            }
            for (std::size_t i = 0; i < states.size(); ++i) {
                const bool sees = i < cur.partition.guaranteed.size() && !cur.partition.guaranteed[i].empty();
                if (!warned[i] && sees && !shared[i] && rec.areas.cells[i] <= 0.0) {
                    warned[i] = true;
                    log.warnings.push_back("agent " + std::to_string(i) + " is fully dominated at step " +
                                           std::to_string(step) + " and receives zero control");
                }
            }
            if (snaps.count(step)) log.snapshots.emplace(step, cur.partition);

            if (step == s.steps) {
                rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
                log.records.push_back(std::move(rec));
                break;
            }

            // Jacobi update: every agent moves from the same snapshot.
            double dt = s.dt;
            std::vector<AgentState> next(states.size());
            Evaluation nxt;
            for (;;) {
                for (std::size_t i = 0; i < states.size(); ++i) {
                    next[i] = control::project_state(states[i], cur.controls[i], dt, lims[i], s.omega, popts);
                }
                nxt = evaluate(s, next);
                const double h0 = cur.report.H;
                const bool dropped = nxt.report.H - h0 < -kMonotonicityTolerance * std::abs(h0);
                if (!s.adaptive_dt || !dropped || 0.5 * dt < s.dt_floor) break;
                dt *= 0.5;
            }
            rec.dt_used = dt;
            rec.wall_seconds = std::chrono::duration<double>(Clock::now() - t_start).count();
            log.records.push_back(std::move(rec));
            states = std::move(next);
            cur = std::move(nxt);
        }
    } catch (const std::exception& e) {
        throw Error("simulation failed at step " + std::to_string(step) + ": " + e.what());
    }

    log.monotonicity_violations = count_monotonicity_violations(log.records);
    log.converged = log.records.back().max_control_norm < s.convergence_threshold;
    return log;
}

}  // namespace ptzcov::sim
