"""车辆动力学核心：IDM、欧拉积分与状态历史"""

from .idm import (
    AccelBounds,
    DEFAULT_BOUNDS,
    GapContractError,
    IdmParams,
    PRESETS,
    VehicleType,
    desired_spacing,
    equilibrium_gap,
    idm_accel,
)
from .state import Powertrain, VehicleKind, VehicleState, euler_step, gap_sum, predecessor
from .history import HistoryLookupError, Snapshot, StateHistory, history_lookup

__all__ = [
    "AccelBounds",
    "DEFAULT_BOUNDS",
    "GapContractError",
    "IdmParams",
    "PRESETS",
    "VehicleType",
    "desired_spacing",
    "equilibrium_gap",
    "idm_accel",
    "Powertrain",
    "VehicleKind",
    "VehicleState",
    "euler_step",
    "gap_sum",
    "predecessor",
    "HistoryLookupError",
    "Snapshot",
    "StateHistory",
    "history_lookup",
]
