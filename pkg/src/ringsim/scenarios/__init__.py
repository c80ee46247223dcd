"""场景定义与仿真引擎"""

from .definitions import (
    DEFAULT_PHASES,
    SCENARIO_ORDER,
    SCENARIOS,
    Phase,
    ScenarioConfigError,
    ScenarioDef,
    SimConfig,
    get_scenario,
)
from .engine import (
    Collision,
    RunResult,
    Trajectory,
    build_initial,
    detect_collision,
    fleet_label,
    run,
    tick_time,
)

__all__ = [
    "DEFAULT_PHASES",
    "SCENARIO_ORDER",
    "SCENARIOS",
    "Phase",
    "ScenarioConfigError",
    "ScenarioDef",
    "SimConfig",
    "get_scenario",
    "Collision",
    "RunResult",
    "Trajectory",
    "build_initial",
    "detect_collision",
    "fleet_label",
    "run",
    "tick_time",
]
