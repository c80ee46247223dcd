"""
测试公共夹具
"""

from typing import Sequence

import pytest

from src.ringsim.attacks.injectors import WorldView
from src.ringsim.attacks.spec import AttackKind, AttackSpec
from src.ringsim.dynamics.history import StateHistory
from src.ringsim.dynamics.idm import AccelBounds
from src.ringsim.dynamics.state import VehicleKind, VehicleState
from src.ringsim.scenarios.definitions import Phase, ScenarioDef, SimConfig, get_scenario


def make_states(speeds: Sequence[float], gaps: Sequence[float]) -> list:
    """按编号构造车辆状态（位置不参与注入器计算）"""
    return [
        VehicleState(
            id=k,
            position=float(10 * k),
            speed=float(v),
            gap=float(g),
            accel=0.0,
            kind=VehicleKind.HDV,
        )
        for k, (v, g) in enumerate(zip(speeds, gaps))
    ]


@pytest.fixture
def state_factory():
    """车辆状态构造函数"""
    return make_states


@pytest.fixture
def short_phases():
    """10 秒仿真使用的阶段划分"""
    return (
        Phase("pre", 2.0, 4.0),
        Phase("during", 4.0, 6.0),
        Phase("post", 6.0, 10.0, closed=True),
    )


@pytest.fixture
def short_config(short_phases):
    """场景 I、EV 车队、10 秒、无攻击"""
    return SimConfig(scenario=get_scenario("I"), duration=10.0, phases=short_phases)


@pytest.fixture
def toy_config():
    """两车、两个 tick 的最小仿真"""
    return SimConfig(
        scenario=ScenarioDef("T", frozenset({1}), frozenset({1})),
        n_vehicles=2,
        ring_length=20.0,
        vehicle_length=5.0,
        dt=0.5,
        duration=0.5,
        phases=(Phase("all", 0.0, 0.5, closed=True),),
    )


@pytest.fixture
def crash_config():
    """单辆 ACC 遭受 FA 且几乎无法制动，必然追尾前车"""
    return SimConfig(
        scenario=ScenarioDef("T", frozenset({1}), frozenset({1})),
        duration=30.0,
        phases=(
            Phase("pre", 0.0, 10.0),
            Phase("during", 10.0, 20.0),
            Phase("post", 20.0, 30.0, closed=True),
        ),
        bounds=AccelBounds(xi=-0.01, rho=5.0),
        attack=AttackSpec(kind=AttackKind.FA, window=(0.0, 30.0)),
    )


@pytest.fixture
def world():
    """
    4 车世界：历史步长 0.5 s，共 7 条记录 (t = 0..3 s)

    第 n 条记录的间距为 基础间距 + n，最后一条即当前状态。
    """
    speeds = [10.0, 12.0, 8.0, 11.0]
    base_gaps = [20.0, 15.0, 25.0, 18.0]
    history = StateHistory(dt=0.5)
    states = None
    for tick in range(7):
        states = make_states(speeds, [g + tick for g in base_gaps])
        history.record(states)
    return WorldView(states=states, history=history, vehicle_length=5.0)
