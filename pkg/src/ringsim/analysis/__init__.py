"""稳定性指标与风险分级"""

from .metrics import (
    METRIC_NAMES,
    THW_SPEED_FLOOR,
    PhaseMetrics,
    mean_ssd,
    mean_vsd,
    phase_is_valid,
    phase_metrics,
    ssd_per_vehicle,
    thw,
    v_avg,
    vsd_per_vehicle,
    window_mask,
)
from .risk import (
    FleetComparison,
    FleetOutcome,
    IncompleteOutcomeError,
    RiskClass,
    classify_risk,
    compare_fleets,
)

__all__ = [
    "METRIC_NAMES",
    "THW_SPEED_FLOOR",
    "PhaseMetrics",
    "mean_ssd",
    "mean_vsd",
    "phase_is_valid",
    "phase_metrics",
    "ssd_per_vehicle",
    "thw",
    "v_avg",
    "vsd_per_vehicle",
    "window_mask",
    "FleetComparison",
    "FleetOutcome",
    "IncompleteOutcomeError",
    "RiskClass",
    "classify_risk",
    "compare_fleets",
]
