"""
风险分级与车队对比
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from ..scenarios.definitions import SCENARIO_ORDER
from .metrics import PhaseMetrics

logger = logging.getLogger(__name__)

NOT_AVAILABLE = "---"
TIE = "tie"


class IncompleteOutcomeError(ValueError):
    """缺少部分场景的碰撞结果"""


class RiskClass(Enum):
    """三级风险"""
    LOW = "Low"
    VARIABLE = "Variable"
    HIGH = "High"


def classify_risk(
    outcomes: Mapping[str, bool], scenarios: Sequence[str] = SCENARIO_ORDER
) -> RiskClass:
    """
    根据各场景是否发生碰撞给出风险等级

    Args:
        outcomes: 场景编号 -> 是否发生碰撞
        scenarios: 必须全部给出的场景

    Returns:
        RiskClass: 全部碰撞为 High，全部无碰撞为 Low，否则 Variable

    Raises:
        IncompleteOutcomeError: 缺少任一场景的结果
    """
    missing = [s for s in scenarios if s not in outcomes]
    if missing:
        raise IncompleteOutcomeError(f"缺少场景 {', '.join(missing)} 的碰撞结果")

    bits = [bool(outcomes[s]) for s in scenarios]
    if all(bits):
        return RiskClass.HIGH
    if not any(bits):
        return RiskClass.LOW
    return RiskClass.VARIABLE


@dataclass(frozen=True)
class FleetOutcome:
    """单次仿真在车队对比中使用的信息"""
    fleet: str
    metrics: Tuple[PhaseMetrics, ...]
    collision_time: Optional[float] = None


@dataclass(frozen=True)
class FleetComparison:
    """同一攻击下 EV 与 ICE 的对比结论"""
    higher_v_avg: str
    lower_vsd: str
    lower_ssd: str
    shorter_ttc: str
    recovery: Dict[str, bool]


def _pick(means: Mapping[str, float], prefer_high: bool) -> str:
    if len(means) < 2:
        return next(iter(means)) if means else NOT_AVAILABLE
    ordered = sorted(means.items(), key=lambda kv: kv[1], reverse=prefer_high)
    if ordered[0][1] == ordered[1][1]:
        return TIE
    return ordered[0][0]


def _valid_means(outcomes: Iterable[FleetOutcome], metric: str) -> Dict[str, float]:
    values: Dict[str, List[float]] = defaultdict(list)
    for outcome in outcomes:
        for phase in outcome.metrics:
            value = phase.value(metric)
            if phase.valid and value is not None:
                values[outcome.fleet].append(value)
    return {fleet: float(np.mean(v)) for fleet, v in values.items() if v}


def compare_fleets(outcomes: Sequence[FleetOutcome]) -> FleetComparison:
    """
    对比同一攻击下两种车队的表现

    数值指标取全部有效阶段的平均值；碰撞时间取发生碰撞的仿真的平均值；
    恢复能力表示该车队所有仿真的最后阶段均有效。

    Args:
        outcomes: 该攻击下的所有仿真结果

    Returns:
        FleetComparison: 每项给出胜出的车队、"tie" 或 "---"
    """
    collision_times: Dict[str, List[float]] = defaultdict(list)
    recovery: Dict[str, bool] = {}
    for outcome in outcomes:
        if outcome.collision_time is not None:
            collision_times[outcome.fleet].append(outcome.collision_time)
        post_valid = bool(outcome.metrics) and outcome.metrics[-1].valid
        recovery[outcome.fleet] = recovery.get(outcome.fleet, True) and post_valid

    ttc_means = {fleet: float(np.mean(times)) for fleet, times in collision_times.items()}
    return FleetComparison(
        higher_v_avg=_pick(_valid_means(outcomes, "v_avg"), prefer_high=True),
        lower_vsd=_pick(_valid_means(outcomes, "mean_vsd"), prefer_high=False),
        lower_ssd=_pick(_valid_means(outcomes, "mean_ssd"), prefer_high=False),
        shorter_ttc=_pick(ttc_means, prefer_high=False),
        recovery=dict(sorted(recovery.items())),
    )
