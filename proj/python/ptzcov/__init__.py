"""Coverage control for teams of aerial agents carrying pan-tilt-zoom cameras."""

from ._core import (
    AgentLimits,
    AgentState,
    ControlInput,
    Error,
    Gains,
    RunLog,
    Scenario,
    ScenarioError,
    check_gradients,
    control_inputs,
    guaranteed_region,
    load_scenario,
    objective,
    objective_oracle,
    parse_scenario,
    pattern_shape,
    quality,
    run,
    sensing_pattern,
)

__all__ = [
    "AgentLimits",
    "AgentState",
    "ControlInput",
    "Error",
    "Gains",
    "RunLog",
    "Scenario",
    "ScenarioError",
    "check_gradients",
    "control_inputs",
    "guaranteed_region",
    "load_scenario",
    "objective",
    "objective_oracle",
    "parse_scenario",
    "pattern_shape",
    "quality",
    "run",
    "sensing_pattern",
]
