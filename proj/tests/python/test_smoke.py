import math
import os
from pathlib import Path

import pytest

import ptzcov

SCENARIOS = Path(os.environ.get("PTZCOV_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))
DEG = math.pi / 180.0


def octagon(radius=4.0):
    return [(radius * math.cos(math.pi / 8 + k * math.pi / 4), radius * math.sin(math.pi / 8 + k * math.pi / 4))
            for k in range(8)]


def limits():
    return ptzcov.AgentLimits(0.3, 3.8, 15 * DEG, 35 * DEG, 0.05, 50 * DEG)


def test_downward_pattern_is_a_circle():
    a, b, offset = ptzcov.pattern_shape(1.5, 0.0, 20 * DEG)
    assert a == pytest.approx(1.5 * math.tan(20 * DEG), abs=1e-12)
    assert b == pytest.approx(a, abs=1e-12)
    assert offset == pytest.approx(0.0, abs=1e-12)


def test_best_quality_is_one():
    lims = limits()
    s = ptzcov.AgentState(z=lims.z_min, h=0.0, delta=lims.delta_min, r=lims.r)
    assert ptzcov.quality(s, lims) == 1.0


def test_guaranteed_region_shrinks_and_vanishes():
    s = ptzcov.AgentState(z=1.0, delta=20 * DEG, r=0.1)
    g = ptzcov.guaranteed_region(s)
    assert g["semi_major"] == pytest.approx(math.tan(20 * DEG) - 0.1, abs=1e-12)
    s.r = 5.0
    assert ptzcov.guaranteed_region(s) is None


def test_partition_objective_matches_oracle():
    lims = limits()
    states = [ptzcov.AgentState(x=-0.5, y=0.2, z=1.0, theta=0.3, h=0.2, delta=22 * DEG, r=lims.r),
              ptzcov.AgentState(x=0.6, y=-0.1, z=1.2, theta=2.0, h=-0.3, delta=18 * DEG, r=lims.r)]
    rep = ptzcov.objective(states, [lims, lims], octagon(), polygonization=128)
    oracle = ptzcov.objective_oracle(states, [lims, lims], octagon(), resolution=512)
    assert rep["H"] == pytest.approx(oracle, rel=5e-3)
    assert abs(rep["tiling_defect"]) < 1e-9


def test_controls_and_gradient_check():
    lims = limits()
    states = [ptzcov.AgentState(x=0.1, y=0.0, z=1.0, theta=0.5, h=0.3, delta=20 * DEG, r=lims.r)]
    u = ptzcov.control_inputs(states, [lims], octagon(), ptzcov.Gains())
    assert len(u) == 1 and u[0].norm() > 0.0
    entries = ptzcov.check_gradients(states, [lims], octagon(), resolution=256)
    assert len(entries) == 6
    assert all(e["pass"] for e in entries)


def test_scenario_run_and_outputs(tmp_path):
    sc = ptzcov.load_scenario(str(SCENARIOS / "case1.yaml"), steps=20)
    assert sc.steps == 20 and sc.mode == "ptz" and len(sc.initial_states()) == 3
    log = ptzcov.run(sc)
    assert len(log.H) == 21
    assert log.monotonicity_violations == 0
    assert log.H[-1] > log.H[0]
    log.write_outputs(str(tmp_path))
    for name in ("trajectories.csv", "objective.csv", "summary.json", "partition_0.json"):
        assert (tmp_path / name).exists()


def test_scenario_errors_are_typed():
    with pytest.raises(ptzcov.ScenarioError):
        ptzcov.parse_scenario("dt: -1\n")
    with pytest.raises(ptzcov.ScenarioError):
        ptzcov.load_scenario("/nonexistent.yaml")
