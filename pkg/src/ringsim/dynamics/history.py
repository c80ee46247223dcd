"""
逐时间步状态历史

每个 tick 记录全部车辆的 (gap, speed) 快照，供延迟类攻击按历史时刻查询。
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

from .state import VehicleState

logger = logging.getLogger(__name__)

# 时间比较容差，吸收 n * dt 的浮点误差
TIME_EPSILON = 1e-9


class HistoryLookupError(ValueError):
    """历史查询时间超出 [0, 当前时间]"""


@dataclass(frozen=True, slots=True)
class Snapshot:
    """某一 tick 的全车快照"""
    tick: int
    gaps: Tuple[float, ...]
    speeds: Tuple[float, ...]


@dataclass
class StateHistory:
    """状态历史，第 n 条记录对应时刻 n * dt"""
    dt: float
    records: List[Snapshot] = field(default_factory=list)

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError(f"步长必须为正: dt = {self.dt}")

    @property
    def current_tick(self) -> int:
        return len(self.records) - 1

    @property
    def current_time(self) -> float:
        return self.current_tick * self.dt

    def record(self, states: Sequence[VehicleState]) -> Snapshot:
        """追加当前 tick 的快照"""
        snapshot = Snapshot(
            tick=len(self.records),
            gaps=tuple(state.gap for state in states),
            speeds=tuple(state.speed for state in states),
        )
        self.records.append(snapshot)
        return snapshot

    def lookup(self, t_query: float) -> Snapshot:
        """按时间查询最近 tick 的快照，见 history_lookup"""
        return history_lookup(self, t_query)


def history_lookup(h: StateHistory, t_query: float) -> Snapshot:
    """
    查询距 t_query 最近的 tick 快照（四舍五入，0.5 进位）

    Args:
        h: 状态历史
        t_query: 查询时刻 (s)

    Returns:
        Snapshot: 对应快照

    Raises:
        HistoryLookupError: t_query < 0 或晚于当前时刻
    """
    if not h.records:
        raise HistoryLookupError("历史记录为空")
    if t_query < -TIME_EPSILON or t_query > h.current_time + TIME_EPSILON:
        raise HistoryLookupError(
            f"历史查询超出范围: t = {t_query}, 可用区间 [0, {h.current_time}]"
        )
    tick = math.floor(t_query / h.dt + 0.5)
    tick = min(max(tick, 0), h.current_tick)
    return h.records[tick]
