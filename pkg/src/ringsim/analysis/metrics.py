"""
阶段稳定性指标模块

负责：
- 车头时距 THW
- 速度标准差 VSD / 间距标准差 SSD（逐车与全车队平均）
- 平均速度 V_avg
- 按阶段（pre / during / post）汇总并标记因碰撞失效的阶段
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from ..scenarios.definitions import Phase
from ..scenarios.engine import RunResult, Trajectory

logger = logging.getLogger(__name__)

# THW 统计时排除的低速样本阈值 (m/s)
THW_SPEED_FLOOR = 0.1


def window_mask(trajectory: Trajectory, phase: Phase) -> np.ndarray:
    """阶段窗口内 tick 的布尔掩码"""
    times = trajectory.times
    upper = times <= phase.end if phase.closed else times < phase.end
    return (times >= phase.start) & upper


def _window_values(values: np.ndarray, trajectory: Trajectory, phase: Phase) -> np.ndarray:
    mask = window_mask(trajectory, phase)
    if not mask.any():
        raise ValueError(f"阶段 {phase.name} [{phase.start}, {phase.end}] 内没有采样点")
    return values[mask]


def thw(trajectory: Trajectory, phase: Phase, speed_floor: float = THW_SPEED_FLOOR) -> Optional[float]:
    """
    车头时距：窗口内全部车辆、全部 tick 的 gap / speed 平均值

    速度 <= speed_floor 的样本被排除。

    Args:
        trajectory: 轨迹
        phase: 阶段窗口
        speed_floor: 低速排除阈值 (m/s)

    Returns:
        Optional[float]: THW (s)，样本全部被排除时为 None
    """
    speeds = _window_values(trajectory.speeds, trajectory, phase)
    gaps = _window_values(trajectory.gaps, trajectory, phase)
    moving = speeds > speed_floor
    if not moving.any():
        logger.debug(f"阶段 {phase.name} 无有效速度样本，THW 无定义")
        return None
    return float(np.mean(gaps[moving] / speeds[moving]))


def vsd_per_vehicle(trajectory: Trajectory, vehicle: int, phase: Phase) -> float:
    """车辆速度的总体标准差（除以 T）"""
    return float(np.std(_window_values(trajectory.speeds, trajectory, phase)[:, vehicle]))


def ssd_per_vehicle(trajectory: Trajectory, vehicle: int, phase: Phase) -> float:
    """车辆间距的总体标准差（除以 T）"""
    return float(np.std(_window_values(trajectory.gaps, trajectory, phase)[:, vehicle]))


def mean_vsd(trajectory: Trajectory, phase: Phase) -> float:
    """全车队 VSD 平均值（ACC 与 HDV 一并计入）"""
    return float(np.mean(np.std(_window_values(trajectory.speeds, trajectory, phase), axis=0)))


def mean_ssd(trajectory: Trajectory, phase: Phase) -> float:
    """全车队 SSD 平均值"""
    return float(np.mean(np.std(_window_values(trajectory.gaps, trajectory, phase), axis=0)))


def v_avg(trajectory: Trajectory, phase: Phase) -> float:
    """各车时间平均速度的车队平均"""
    return float(np.mean(np.mean(_window_values(trajectory.speeds, trajectory, phase), axis=0)))


@dataclass(frozen=True)
class PhaseMetrics:
    """单阶段汇总指标，valid=False 时所有数值缺失"""
    phase: str
    valid: bool
    v_avg: Optional[float] = None
    mean_vsd: Optional[float] = None
    mean_ssd: Optional[float] = None
    thw: Optional[float] = None

    def value(self, metric: str) -> Optional[float]:
        return getattr(self, metric)

    def to_dict(self) -> Dict[str, object]:
        return {
            "phase": self.phase,
            "valid": self.valid,
            "v_avg": self.v_avg,
            "mean_vsd": self.mean_vsd,
            "mean_ssd": self.mean_ssd,
            "thw": self.thw,
        }


METRIC_NAMES: Tuple[str, ...] = ("v_avg", "mean_vsd", "mean_ssd", "thw")


def phase_is_valid(result: RunResult, phase: Phase) -> bool:
    """阶段未被碰撞截断时有效"""
    if result.collision is None:
        return True
    if phase.closed:
        return result.collision.time > phase.end
    return result.collision.time >= phase.end


def compute_phase(result: RunResult, phase: Phase) -> PhaseMetrics:
    """计算单个阶段的指标"""
    if not phase_is_valid(result, phase):
        return PhaseMetrics(phase=phase.name, valid=False)

    trajectory = result.trajectory
    return PhaseMetrics(
        phase=phase.name,
        valid=True,
        v_avg=v_avg(trajectory, phase),
        mean_vsd=mean_vsd(trajectory, phase),
        mean_ssd=mean_ssd(trajectory, phase),
        thw=thw(trajectory, phase),
    )


def phase_metrics(result: RunResult, phases: Optional[Iterable[Phase]] = None) -> Tuple[PhaseMetrics, ...]:
    """
    计算一次仿真全部阶段的指标

    Args:
        result: 仿真结果
        phases: 阶段列表，默认取仿真配置中的阶段

    Returns:
        Tuple[PhaseMetrics, ...]: 按阶段顺序排列
    """
    phases = tuple(phases) if phases is not None else result.config.phases
    return tuple(compute_phase(result, phase) for phase in phases)
