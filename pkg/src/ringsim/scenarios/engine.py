"""
仿真引擎

每个 tick 依次执行：
1. 当前状态写入历史
2. 为每辆车构造控制器输入（δ = 1 时注入攻击）
3. 按车辆参数计算 IDM 加速度
4. 欧拉积分
5. 碰撞检测，任一间距 <= 0 即记录碰撞并终止
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..attacks.injectors import WorldView, controller_inputs, is_active
from ..attacks.spec import AttackKind
from ..dynamics.history import StateHistory
from ..dynamics.idm import idm_accel
from ..dynamics.state import Powertrain, VehicleKind, VehicleState, euler_step, predecessor
from ..logging_config import log_performance
from .definitions import SimConfig

logger = logging.getLogger(__name__)

# tick 时间保留的小数位数，使整秒 tick 精确落在整数上
TIME_DECIMALS = 9


def tick_time(tick: int, dt: float) -> float:
    """第 tick 步对应的仿真时刻"""
    return round(tick * dt, TIME_DECIMALS)


@dataclass(frozen=True)
class Collision:
    """碰撞记录"""
    time: float
    follower: int
    leader: int
    tick: int


@dataclass(frozen=True)
class Trajectory:
    """完整轨迹，二维数组形状为 (ticks, vehicles)"""
    times: np.ndarray
    positions: np.ndarray
    speeds: np.ndarray
    gaps: np.ndarray
    accels: np.ndarray

    @property
    def n_ticks(self) -> int:
        return int(self.times.shape[0])

    @property
    def n_vehicles(self) -> int:
        return int(self.speeds.shape[1])

    @property
    def end_time(self) -> float:
        return float(self.times[-1])

    def truncate(self, t_end: float) -> "Trajectory":
        """截取 t <= t_end 的前缀"""
        keep = self.times <= t_end + 1e-9
        return Trajectory(
            times=self.times[keep],
            positions=self.positions[keep],
            speeds=self.speeds[keep],
            gaps=self.gaps[keep],
            accels=self.accels[keep],
        )


@dataclass(frozen=True)
class RunResult:
    """单次仿真结果，生成后不可变"""
    config: SimConfig
    trajectory: Trajectory
    collision: Optional[Collision] = None

    @property
    def collided(self) -> bool:
        return self.collision is not None


def build_initial(config: SimConfig) -> List[VehicleState]:
    """
    构造初始状态：全部静止、均匀间距

    车辆 k 的前车 k-1 位于其前方一个车位处，车辆 0 跟随车辆 N-1。

    Args:
        config: 仿真配置

    Returns:
        List[VehicleState]: 按编号排列的初始状态

    Raises:
        ScenarioConfigError: 配置违反间距和恒等式等不变量
    """
    config.validate()
    n = config.n_vehicles
    slot = config.gap0 + config.vehicle_length
    states = []
    for k in range(n):
        is_acc = k in config.scenario.acc_ids
        states.append(
            VehicleState(
                id=k,
                position=((n - k) % n) * slot,
                speed=0.0,
                gap=config.gap0,
                accel=0.0,
                kind=VehicleKind.ACC if is_acc else VehicleKind.HDV,
                powertrain=config.fleet_powertrain if is_acc else None,
            )
        )
    return states


def detect_collision(states: Sequence[VehicleState]) -> Optional[Tuple[int, int]]:
    """
    碰撞检测：返回编号最小且间距 <= 0 的车辆及其前车

    Args:
        states: 车辆状态

    Returns:
        Optional[Tuple[int, int]]: (后车, 前车) 或 None
    """
    n = len(states)
    for state in states:
        if state.gap <= 0:
            return state.id, predecessor(state.id, n)
    return None


@log_performance
def run(config: SimConfig) -> RunResult:
    """
    执行一次确定性仿真

    Args:
        config: 仿真配置

    Returns:
        RunResult: 轨迹、碰撞记录与配置回显
    """
    states = build_initial(config)
    n = config.n_vehicles
    dt = config.dt
    attack = config.attack
    params = [config.params_for(k) for k in range(n)]

    logger.info(
        f"开始仿真: 场景 {config.scenario.id}, 车队 {config.fleet_powertrain.value}, "
        f"攻击 {attack.label}, 共 {config.n_steps} 步"
    )

    history = StateHistory(dt=dt)
    history.record(states)
    rows: List[Tuple[Tuple[float, ...], ...]] = [_row(states)]
    times = [0.0]
    frozen_speeds = {}
    collision = None

    for tick in range(config.n_steps):
        t = tick_time(tick, dt)

        # FA 在窗口内的第一个 tick 采样冻结速度
        if attack.kind is AttackKind.FA:
            for target in attack.targets:
                if target not in frozen_speeds and is_active(attack, target, t):
                    frozen_speeds[target] = states[target].speed
                    logger.debug(f"FA 冻结车辆 {target} 速度 {states[target].speed:.4f} m/s (t={t:.3f}s)")

        world = WorldView(states=states, history=history, vehicle_length=config.vehicle_length)
        accels = []
        for k in range(n):
            inputs = controller_inputs(world, attack, k, t, frozen_speeds)
            accels.append(idm_accel(params[k], inputs.v_eff, inputs.s_eff, inputs.dv_eff, config.bounds))

        states = euler_step(states, accels, dt, config.ring_length)
        history.record(states)
        times.append(tick_time(tick + 1, dt))
        rows.append(_row(states))

        hit = detect_collision(states)
        if hit is not None:
            follower, leader = hit
            collision = Collision(time=times[-1], follower=follower, leader=leader, tick=tick + 1)
            logger.info(f"检测到碰撞: t={collision.time:.3f}s, 车辆 {follower} 追尾车辆 {leader}")
            break

    trajectory = _build_trajectory(times, rows)
    if collision is None:
        logger.info(f"仿真完成: 场景 {config.scenario.id}, {config.fleet_powertrain.value}, 无碰撞")
    return RunResult(config=config, trajectory=trajectory, collision=collision)


def _row(states: Sequence[VehicleState]) -> Tuple[Tuple[float, ...], ...]:
    return (
        tuple(s.position for s in states),
        tuple(s.speed for s in states),
        tuple(s.gap for s in states),
        tuple(s.accel for s in states),
    )


def _build_trajectory(times: List[float], rows: List[Tuple[Tuple[float, ...], ...]]) -> Trajectory:
    positions, speeds, gaps, accels = (np.array(column, dtype=np.float64) for column in zip(*rows))
    return Trajectory(
        times=np.array(times, dtype=np.float64),
        positions=positions,
        speeds=speeds,
        gaps=gaps,
        accels=accels,
    )


def fleet_label(powertrain: Powertrain) -> str:
    return "EV" if powertrain is Powertrain.EV else "ICE"
