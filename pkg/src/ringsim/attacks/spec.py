"""
攻击描述与控制器输入类型
"""

import math
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

logger = logging.getLogger(__name__)


class AttackKind(Enum):
    """攻击类型"""
    NONE = "None"
    DPDA = "DPDA"  # 离散丢包（延迟）攻击
    PA = "PA"      # 幻影攻击
    FA = "FA"      # 定速攻击
    BA = "BA"      # 致盲攻击
    AVA = "AVA"    # 角速度攻击
    MA = "MA"      # 混合攻击 (DPDA + PA)

    @classmethod
    def parse(cls, value: str) -> "AttackKind":
        """按名称（不区分大小写）解析攻击类型"""
        normalized = str(value).strip().upper()
        for kind in cls:
            if kind.value.upper() == normalized or kind.name == normalized:
                return kind
        raise ValueError(f"未知攻击类型: {value!r}")


ATTACK_KINDS: Tuple[AttackKind, ...] = (
    AttackKind.DPDA,
    AttackKind.PA,
    AttackKind.FA,
    AttackKind.BA,
    AttackKind.AVA,
    AttackKind.MA,
)

AVA_TRIG_FUNCTIONS = {"sin": math.sin, "cos": math.cos}


@dataclass(frozen=True)
class AttackSpec:
    """攻击配置

    targets 为空时由场景的被攻击车辆集合补全（见 with_targets）。
    source_map 以 (目标, 信息源) 对的形式保存，未列出的目标默认取其前车。
    """
    kind: AttackKind = AttackKind.NONE
    targets: FrozenSet[int] = frozenset()
    window: Tuple[float, float] = (60.0, 90.0)
    delay_m: float = 0.0
    blinded_p: int = 0
    spacing_cap_phi: float = 50.0
    ba_gaps_only: bool = False
    gain_k: float = 0.002
    angle_rate_omega: float = 1.0
    ava_trig: str = "sin"
    source_map: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    @property
    def t_start(self) -> float:
        return self.window[0]

    @property
    def t_end(self) -> float:
        return self.window[1]

    def source_of(self, target: int, n_vehicles: int) -> int:
        """PA/MA 中目标车辆接收信息的来源车辆 j"""
        for vehicle, source in self.source_map:
            if vehicle == target:
                return source
        return (target - 1) % n_vehicles

    def with_targets(self, targets: Iterable[int]) -> "AttackSpec":
        """返回替换目标集合后的新配置"""
        return replace(self, targets=frozenset(targets))

    def validate(self, n_vehicles: int, duration: Optional[float] = None) -> None:
        """
        校验攻击参数

        Args:
            n_vehicles: 车辆数
            duration: 仿真时长，窗口超出时只给出警告

        Raises:
            ValueError: 违反不变量，消息中包含具体约束
        """
        if self.kind is AttackKind.NONE:
            return
        t_start, t_end = self.window
        if t_start < 0:
            raise ValueError(f"window: t_start ≥ 0 (当前 {t_start})")
        if not t_start < t_end:
            raise ValueError(f"window: t_start < t_end (当前 [{t_start}, {t_end}))")
        if duration is not None and t_end > duration:
            logger.warning(f"攻击窗口 [{t_start}, {t_end}) 超出仿真时长 {duration}s")
        if self.delay_m < 0:
            raise ValueError(f"delay_m ≥ 0 (当前 {self.delay_m})")
        if self.blinded_p < 0:
            raise ValueError(f"blinded_p ≥ 0 (当前 {self.blinded_p})")
        if self.blinded_p >= n_vehicles:
            raise ValueError(f"blinded_p < n_vehicles (当前 {self.blinded_p})")
        if not self.spacing_cap_phi > 0:
            raise ValueError(f"spacing_cap_phi > 0 (当前 {self.spacing_cap_phi})")
        if self.ava_trig not in AVA_TRIG_FUNCTIONS:
            raise ValueError(f"ava_trig ∈ {{sin, cos}} (当前 {self.ava_trig!r})")
        for vehicle in self.targets:
            if not 0 <= vehicle < n_vehicles:
                raise ValueError(f"targets ⊂ {{0..{n_vehicles - 1}}} (当前包含 {vehicle})")
        for vehicle, source in self.source_map:
            if vehicle not in self.targets:
                raise ValueError(f"source_map 的键必须是攻击目标 (当前 {vehicle})")
            if not 0 <= source < n_vehicles:
                raise ValueError(f"source_map 信息源 ⊂ {{0..{n_vehicles - 1}}} (当前 {source})")

    @property
    def label(self) -> str:
        """报告中使用的攻击标签"""
        if self.kind is AttackKind.NONE:
            return "baseline"
        if self.kind is AttackKind.DPDA:
            return f"DPDA(m={self.delay_m:g})"
        if self.kind is AttackKind.MA:
            return f"MA(m={self.delay_m:g})"
        if self.kind is AttackKind.BA:
            return f"BA(p={self.blinded_p},phi={self.spacing_cap_phi:g})"
        if self.kind is AttackKind.AVA:
            return f"AVA(k={self.gain_k:g})"
        return self.kind.value

    @property
    def slug(self) -> str:
        """文件名安全的攻击标签"""
        if self.kind is AttackKind.NONE:
            return "baseline"
        if self.kind in (AttackKind.DPDA, AttackKind.MA):
            return f"{self.kind.value}_m{self.delay_m:g}"
        if self.kind is AttackKind.BA:
            return f"BA_p{self.blinded_p}_phi{self.spacing_cap_phi:g}"
        if self.kind is AttackKind.AVA:
            return f"AVA_k{self.gain_k:g}"
        return self.kind.value

    def to_dict(self) -> Dict[str, object]:
        """配置回显用的字典形式"""
        data: Dict[str, object] = {
            "kind": self.kind.value,
            "targets": sorted(self.targets),
            "window": [float(self.t_start), float(self.t_end)],
            "delay_m": float(self.delay_m),
            "blinded_p": int(self.blinded_p),
            "spacing_cap_phi": float(self.spacing_cap_phi),
            "ba_gaps_only": bool(self.ba_gaps_only),
            "gain_k": float(self.gain_k),
            "angle_rate_omega": float(self.angle_rate_omega),
            "ava_trig": self.ava_trig,
        }
        if self.source_map:
            data["source_map"] = {int(vehicle): int(source) for vehicle, source in self.source_map}
        return data


NO_ATTACK = AttackSpec()


@dataclass(frozen=True, slots=True)
class ControllerInputs:
    """输入 IDM 的三元组 (v, s, Δv)"""
    v_eff: float
    s_eff: float
    dv_eff: float
