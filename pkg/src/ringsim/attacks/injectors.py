"""
攻击注入器

给定真实世界状态、状态历史与攻击配置，返回各目标车辆 ACC 控制器实际看到的
(v, s, Δv)。只有 s / Δv 通道被篡改的攻击（DPDA、PA、BA、MA）保持本车真实速度；
FA 与 AVA 只篡改速度参数。
"""

import math
import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from ..dynamics.history import HistoryLookupError, StateHistory, TIME_EPSILON
from ..dynamics.state import VehicleState, predecessor
from .spec import AVA_TRIG_FUNCTIONS, AttackKind, AttackSpec, ControllerInputs

logger = logging.getLogger(__name__)

# 被篡改的感知间距下限 (m)，保证 IDM 中 ŝ/s 有定义
PERCEIVED_SPACING_FLOOR = 0.1


@dataclass(frozen=True)
class WorldView:
    """注入器可见的世界：当前状态、历史与车长"""
    states: Sequence[VehicleState]
    history: StateHistory
    vehicle_length: float = 5.0

    @property
    def n_vehicles(self) -> int:
        return len(self.states)


def is_active(spec: AttackSpec, vehicle: int, t: float) -> bool:
    """攻击指示量 δ：车辆在目标集合内且 t ∈ [t_start, t_end)"""
    if spec.kind is AttackKind.NONE:
        return False
    return vehicle in spec.targets and spec.t_start <= t < spec.t_end


def true_inputs(world: WorldView, i: int) -> ControllerInputs:
    """未被篡改的控制器输入"""
    own = world.states[i]
    lead = world.states[predecessor(i, world.n_vehicles)]
    return ControllerInputs(v_eff=own.speed, s_eff=own.gap, dv_eff=lead.speed - own.speed)


def _delayed_snapshot(world: WorldView, spec: AttackSpec, t: float):
    """取 ⌊t - m⌋ 整秒时刻的历史快照"""
    snapshot_time = math.floor(t - spec.delay_m + TIME_EPSILON)
    if snapshot_time < 0:
        raise HistoryLookupError(f"延迟查询时刻为负: ⌊{t} - {spec.delay_m}⌋ = {snapshot_time}")
    return world.history.lookup(float(snapshot_time))


def dpda_inputs(world: WorldView, spec: AttackSpec, i: int, t: float) -> ControllerInputs:
    """
    离散丢包攻击：间距与相对速度取自 ⌊t - m⌋ 时刻的历史快照

    Args:
        world: 世界视图
        spec: 攻击配置（使用 delay_m）
        i: 目标车辆
        t: 当前时刻 (s)

    Returns:
        ControllerInputs: 速度为当前真实值，s/Δv 为历史值
    """
    snapshot = _delayed_snapshot(world, spec, t)
    lead = predecessor(i, world.n_vehicles)
    return ControllerInputs(
        v_eff=world.states[i].speed,
        s_eff=snapshot.gaps[i],
        dv_eff=snapshot.speeds[lead] - snapshot.speeds[i],
    )


def pa_inputs(world: WorldView, spec: AttackSpec, i: int, t: float) -> ControllerInputs:
    """幻影攻击：读取信息源车辆 j 的 (s_j, v_{j-1} - v_j)，自身速度保持真实"""
    n = world.n_vehicles
    j = spec.source_of(i, n)
    source = world.states[j]
    source_lead = world.states[predecessor(j, n)]
    return ControllerInputs(
        v_eff=world.states[i].speed,
        s_eff=source.gap,
        dv_eff=source_lead.speed - source.speed,
    )


def fa_inputs(
    world: WorldView, spec: AttackSpec, i: int, t: float, v_frozen: float
) -> ControllerInputs:
    """定速攻击：控制器的速度参数固定为攻击开始时刻的速度，s 与 Δv 为真实值"""
    live = true_inputs(world, i)
    return ControllerInputs(v_eff=v_frozen, s_eff=live.s_eff, dv_eff=live.dv_eff)


def ba_perceived_spacing(world: WorldView, spec: AttackSpec, i: int) -> float:
    """
    致盲攻击下的感知间距：从 i 到第 p+1 辆前车的累计距离，上限 φ

    默认计入 p 个被忽略车辆的车长；ba_gaps_only 时只累加净间距。

    Args:
        world: 世界视图
        spec: 攻击配置（blinded_p, spacing_cap_phi, ba_gaps_only）
        i: 目标车辆

    Returns:
        float: min(累计距离, φ)
    """
    n = world.n_vehicles
    raw = sum(world.states[(i - z) % n].gap for z in range(spec.blinded_p + 1))
    if not spec.ba_gaps_only:
        raw += spec.blinded_p * world.vehicle_length
    return min(raw, spec.spacing_cap_phi)


def ba_inputs(world: WorldView, spec: AttackSpec, i: int, t: float) -> ControllerInputs:
    """致盲攻击：响应第 p+1 辆前车 j = (i - p - 1) mod N 的速度"""
    n = world.n_vehicles
    j = (i - spec.blinded_p - 1) % n
    own_speed = world.states[i].speed
    return ControllerInputs(
        v_eff=own_speed,
        s_eff=ba_perceived_spacing(world, spec, i),
        dv_eff=world.states[j].speed - own_speed,
    )


def ava_gain(spec: AttackSpec, t: float) -> float:
    """G(φ) = 1 + k·trig(φ)，φ(t) = ω (t - t_start)"""
    angle = spec.angle_rate_omega * (t - spec.t_start)
    return 1.0 + spec.gain_k * AVA_TRIG_FUNCTIONS[spec.ava_trig](angle)


def ava_inputs(world: WorldView, spec: AttackSpec, i: int, t: float) -> ControllerInputs:
    """角速度攻击：速度参数乘以 G(φ)"""
    live = true_inputs(world, i)
    return ControllerInputs(
        v_eff=live.v_eff * ava_gain(spec, t), s_eff=live.s_eff, dv_eff=live.dv_eff
    )


def ma_inputs(world: WorldView, spec: AttackSpec, i: int, t: float) -> ControllerInputs:
    """混合攻击：信息源车辆 j 在 ⌊t - m⌋ 时刻的 (s_j, v_{j-1} - v_j)"""
    n = world.n_vehicles
    j = spec.source_of(i, n)
    snapshot = _delayed_snapshot(world, spec, t)
    return ControllerInputs(
        v_eff=world.states[i].speed,
        s_eff=snapshot.gaps[j],
        dv_eff=snapshot.speeds[predecessor(j, n)] - snapshot.speeds[j],
    )


def controller_inputs(
    world: WorldView,
    spec: AttackSpec,
    i: int,
    t: float,
    frozen_speeds: Optional[Mapping[int, float]] = None,
) -> ControllerInputs:
    """
    统一入口：δ = 0 时返回真实输入，否则按攻击类型注入

    Args:
        world: 世界视图
        spec: 攻击配置
        i: 车辆编号
        t: 当前时刻 (s)
        frozen_speeds: FA 的冻结速度（由仿真引擎在攻击开始时采样）

    Returns:
        ControllerInputs: 控制器输入，被篡改的非正间距截断到下限
    """
    if not is_active(spec, i, t):
        return true_inputs(world, i)

    kind = spec.kind
    if kind is AttackKind.DPDA:
        inputs = dpda_inputs(world, spec, i, t)
    elif kind is AttackKind.PA:
        inputs = pa_inputs(world, spec, i, t)
    elif kind is AttackKind.FA:
        if not frozen_speeds or i not in frozen_speeds:
            raise RuntimeError(f"车辆 {i} 的 FA 冻结速度尚未采样")
        inputs = fa_inputs(world, spec, i, t, frozen_speeds[i])
    elif kind is AttackKind.BA:
        inputs = ba_inputs(world, spec, i, t)
    elif kind is AttackKind.AVA:
        inputs = ava_inputs(world, spec, i, t)
    elif kind is AttackKind.MA:
        inputs = ma_inputs(world, spec, i, t)
    else:
        raise ValueError(f"不支持的攻击类型: {kind}")

    if inputs.s_eff <= 0:
        logger.debug(f"t={t:.3f}s 车辆 {i} 感知间距 {inputs.s_eff:.4f}m 截断到 {PERCEIVED_SPACING_FLOOR}m")
        return ControllerInputs(inputs.v_eff, PERCEIVED_SPACING_FLOOR, inputs.dv_eff)
    return inputs


def information_matrix(spec: AttackSpec, n_vehicles: int) -> np.ndarray:
    """
    信息流邻接矩阵 M（PA/MA 下为篡改后的 M̃）

    M[i, j] = 1 表示车辆 i 使用车辆 j 提供的信息；正常情况下每行唯一的 1 位于前车列。
    PA/MA 的目标行改写到信息源车辆所在列。

    Args:
        spec: 攻击配置
        n_vehicles: 车辆数

    Returns:
        np.ndarray: N×N 的 0/1 整数矩阵
    """
    matrix = np.zeros((n_vehicles, n_vehicles), dtype=np.int8)
    for i in range(n_vehicles):
        matrix[i, predecessor(i, n_vehicles)] = 1
    if spec.kind in (AttackKind.PA, AttackKind.MA):
        for i in sorted(spec.targets):
            matrix[i, :] = 0
            matrix[i, spec.source_of(i, n_vehicles)] = 1
    return matrix
