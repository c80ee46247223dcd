"""
车辆运动状态与显式欧拉积分

环形道路拓扑：车辆 k 的前车为 (k - 1) mod N，车辆 0 跟随车辆 N - 1。
间距一律指保险杠到保险杠的净距离。
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

logger = logging.getLogger(__name__)


class VehicleKind(Enum):
    """驾驶方式"""
    HDV = "HDV"
    ACC = "ACC"


class Powertrain(Enum):
    """ACC 车辆动力类型"""
    EV = "EV"
    ICE = "ICE"


@dataclass(frozen=True, slots=True)
class VehicleState:
    """单车运动学状态"""
    id: int
    position: float  # 环上弧长 [0, L)
    speed: float
    gap: float
    accel: float
    kind: VehicleKind
    powertrain: Optional[Powertrain] = None


def predecessor(k: int, n_vehicles: int) -> int:
    """前车编号"""
    return (k - 1) % n_vehicles


def gap_sum(states: Sequence[VehicleState], vehicle_length: float) -> float:
    """Σ(gap + 车长)，无碰撞时应等于环长"""
    return sum(state.gap + vehicle_length for state in states)


def euler_step(
    states: Sequence[VehicleState], accels: Sequence[float], dt: float, ring_length: float
) -> List[VehicleState]:
    """
    按显式欧拉格式同步更新所有车辆

    间距与位置均使用 t 时刻速度推进，速度用已截断的加速度推进后再截断到 >= 0。
    返回状态允许出现负间距，碰撞判断由引擎单独完成。

    Args:
        states: t 时刻全部车辆状态（按编号排列）
        accels: 每辆车的加速度 (m/s²)
        dt: 步长 (s)
        ring_length: 环长 (m)

    Returns:
        List[VehicleState]: t + dt 时刻的状态
    """
    if dt <= 0:
        raise ValueError(f"步长必须为正: dt = {dt}")
    n = len(states)
    if len(accels) != n:
        raise ValueError(f"加速度数量 {len(accels)} 与车辆数量 {n} 不一致")

    updated = []
    for k, state in enumerate(states):
        lead_speed = states[predecessor(k, n)].speed
        accel = accels[k]
        updated.append(
            VehicleState(
                id=state.id,
                position=(state.position + state.speed * dt) % ring_length,
                speed=max(state.speed + accel * dt, 0.0),
                gap=state.gap + (lead_speed - state.speed) * dt,
                accel=accel,
                kind=state.kind,
                powertrain=state.powertrain,
            )
        )
    return updated
