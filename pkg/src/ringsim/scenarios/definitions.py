"""
仿真场景与配置定义

内置四个场景（车辆编号从 0 开始）：
- I:   ACC {1, 6},          被攻击 {1}          单车攻击
- II:  ACC {1, 3, 5, 7},    被攻击 {1, 5}       两车非相邻攻击
- III: ACC {1, 3, 5, 7, 9}, 被攻击 {1, 5, 9}    三车非相邻攻击
- IV:  ACC {1, 3, 5, 6, 7}, 被攻击 {1, 5, 6}    相邻攻击（5 与 6）
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Mapping, Optional, Tuple

from ..attacks.spec import AttackKind, AttackSpec, NO_ATTACK
from ..dynamics.idm import AccelBounds, DEFAULT_BOUNDS, IdmParams, PRESETS, VehicleType
from ..dynamics.state import Powertrain

logger = logging.getLogger(__name__)

# 浮点容差
GAP_SUM_TOLERANCE = 1e-6


class ScenarioConfigError(ValueError):
    """场景或仿真配置违反不变量"""


@dataclass(frozen=True)
class ScenarioDef:
    """场景：ACC 车辆集合与被攻击车辆集合"""
    id: str
    acc_ids: FrozenSet[int]
    attacked_ids: FrozenSet[int]
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.attacked_ids <= self.acc_ids:
            raise ScenarioConfigError(
                f"场景 {self.id}: attacked_ids ⊆ acc_ids (多出 {sorted(self.attacked_ids - self.acc_ids)})"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "acc_ids": sorted(self.acc_ids),
            "attacked_ids": sorted(self.attacked_ids),
        }


SCENARIOS: Dict[str, ScenarioDef] = {
    "I": ScenarioDef("I", frozenset({1, 6}), frozenset({1}), "Single vehicle attack"),
    "II": ScenarioDef("II", frozenset({1, 3, 5, 7}), frozenset({1, 5}), "Two non-adjacent attacks"),
    "III": ScenarioDef("III", frozenset({1, 3, 5, 7, 9}), frozenset({1, 5, 9}), "Three non-adjacent attacks"),
    "IV": ScenarioDef("IV", frozenset({1, 3, 5, 6, 7}), frozenset({1, 5, 6}), "Adjacent attacks (vehicles 5 and 6)"),
}

SCENARIO_ORDER: Tuple[str, ...] = ("I", "II", "III", "IV")


def get_scenario(scenario_id: str) -> ScenarioDef:
    """按编号获取内置场景"""
    key = str(scenario_id).strip().upper()
    if key not in SCENARIOS:
        raise ScenarioConfigError(f"未知场景: {scenario_id!r}，可选 {', '.join(SCENARIO_ORDER)}")
    return SCENARIOS[key]


@dataclass(frozen=True)
class Phase:
    """统计阶段窗口 [start, end)，最后一个阶段可闭合到 end"""
    name: str
    start: float
    end: float
    closed: bool = False

    def contains(self, t: float) -> bool:
        if self.closed:
            return self.start <= t <= self.end
        return self.start <= t < self.end

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "start": float(self.start), "end": float(self.end), "closed": self.closed}


DEFAULT_PHASES: Tuple[Phase, ...] = (
    Phase("pre", 30.0, 60.0),
    Phase("during", 60.0, 90.0),
    Phase("post", 90.0, 120.0, closed=True),
)


def default_params() -> Dict[VehicleType, IdmParams]:
    return dict(PRESETS)


@dataclass(frozen=True)
class SimConfig:
    """单次仿真配置（始终确定性，无随机种子）"""
    scenario: ScenarioDef
    fleet_powertrain: Powertrain = Powertrain.EV
    n_vehicles: int = 10
    ring_length: float = 300.0
    vehicle_length: float = 5.0
    dt: float = 1.0 / 30.0
    duration: float = 120.0
    phases: Tuple[Phase, ...] = DEFAULT_PHASES
    attack: AttackSpec = NO_ATTACK
    bounds: AccelBounds = DEFAULT_BOUNDS
    params: Mapping[VehicleType, IdmParams] = field(default_factory=default_params)
    initial_gap: Optional[float] = None

    def __post_init__(self):
        # 未指定目标时攻击场景中的全部被攻击车辆
        if self.attack.kind is not AttackKind.NONE and not self.attack.targets:
            object.__setattr__(self, "attack", self.attack.with_targets(self.scenario.attacked_ids))
        object.__setattr__(self, "params", dict(self.params))

    @property
    def slot_length(self) -> float:
        return self.ring_length / self.n_vehicles

    @property
    def gap0(self) -> float:
        """初始均匀净间距"""
        if self.initial_gap is not None:
            return self.initial_gap
        return self.slot_length - self.vehicle_length

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))

    def acc_type(self) -> VehicleType:
        return VehicleType.EV_ACC if self.fleet_powertrain is Powertrain.EV else VehicleType.ICE_ACC

    def vehicle_type(self, vehicle: int) -> VehicleType:
        return self.acc_type() if vehicle in self.scenario.acc_ids else VehicleType.HDV

    def params_for(self, vehicle: int) -> IdmParams:
        return self.params[self.vehicle_type(vehicle)]

    def validate(self) -> None:
        """
        校验配置不变量

        Raises:
            ScenarioConfigError: 任一不变量不满足
        """
        if self.n_vehicles < 1:
            raise ScenarioConfigError(f"n_vehicles ≥ 1 (当前 {self.n_vehicles})")
        if self.ring_length <= 0 or self.vehicle_length <= 0:
            raise ScenarioConfigError("ring_length > 0 且 vehicle_length > 0")
        if self.dt <= 0 or self.duration <= 0:
            raise ScenarioConfigError(f"dt > 0 且 duration > 0 (dt={self.dt}, duration={self.duration})")
        if self.gap0 <= 0:
            raise ScenarioConfigError(f"初始间距必须为正: {self.gap0}")
        total = self.n_vehicles * (self.gap0 + self.vehicle_length)
        if abs(total - self.ring_length) > GAP_SUM_TOLERANCE:
            raise ScenarioConfigError(
                f"n_vehicles·(initial gap + vehicle_length) = ring_length 不成立: {total} ≠ {self.ring_length}"
            )
        for vehicle in self.scenario.acc_ids:
            if not 0 <= vehicle < self.n_vehicles:
                raise ScenarioConfigError(f"场景 {self.scenario.id} 的车辆编号 {vehicle} 超出 0..{self.n_vehicles - 1}")
        previous_end = 0.0
        for phase in self.phases:
            if not phase.start < phase.end:
                raise ScenarioConfigError(f"阶段 {phase.name}: start < end")
            if phase.start < previous_end:
                raise ScenarioConfigError(f"阶段 {phase.name} 与前一阶段重叠或顺序错误")
            if phase.end > self.duration:
                raise ScenarioConfigError(f"阶段 {phase.name} 超出仿真时长 {self.duration}")
            previous_end = phase.end
        missing = [vt.value for vt in VehicleType if vt not in self.params]
        if missing:
            raise ScenarioConfigError(f"缺少 IDM 参数: {', '.join(missing)}")
        try:
            self.attack.validate(self.n_vehicles, self.duration)
        except ValueError as e:
            raise ScenarioConfigError(f"attack.{e}") from e

    def to_dict(self) -> Dict[str, Any]:
        """配置回显（可被 parse_config 重新解析）"""
        data = {
            "scenario": self.scenario.to_dict(),
            "fleet": self.fleet_powertrain.value,
            "n_vehicles": self.n_vehicles,
            "ring_length": float(self.ring_length),
            "vehicle_length": float(self.vehicle_length),
            "dt": float(self.dt),
            "duration": float(self.duration),
            "phases": [phase.to_dict() for phase in self.phases],
            "bounds": {"xi": float(self.bounds.xi), "rho": float(self.bounds.rho)},
            "params": {vt.value: self.params[vt].to_dict() for vt in VehicleType},
            "attack": self.attack.to_dict(),
        }
        if self.initial_gap is not None:
            data["initial_gap"] = float(self.initial_gap)
        return data
