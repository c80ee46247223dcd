"""
IDM 跟驰模型模块

负责：
- IDM 参数向量 θ = [α, β, κ, η, τ, v_d] 的定义与校验
- 三类车辆 (EV-ACC / ICE-ACC / HDV) 的内置参数预设
- 期望间距 ŝ(v, Δv) 与加速度函数 f(θ, v, s, Δv)
- 加速度物理边界 [ξ, ρ] 截断
"""

import math
import logging
from dataclasses import dataclass, asdict, replace
from enum import Enum
from typing import Dict, Any

logger = logging.getLogger(__name__)


class GapContractError(ValueError):
    """间距非正时调用 IDM（说明上游碰撞检测失效）"""


class VehicleType(Enum):
    """车辆参数类型"""
    EV_ACC = "EV-ACC"
    ICE_ACC = "ICE-ACC"
    HDV = "HDV"


@dataclass(frozen=True, slots=True)
class IdmParams:
    """IDM 控制器参数向量

    Attributes:
        alpha: 最大加速度 (m/s²)
        beta: 舒适减速度 (m/s²)
        kappa: 加速度指数
        eta: 最小间距 (m)
        tau: 期望时距 (s)
        v_d: 期望速度 (m/s)
    """
    alpha: float
    beta: float
    kappa: float
    eta: float
    tau: float
    v_d: float

    def __post_init__(self):
        for name in ("alpha", "beta", "kappa", "eta", "tau", "v_d"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"IDM参数无效: {name} > 0 (当前值 {value!r})")

    def with_overrides(self, **overrides: float) -> "IdmParams":
        """返回覆盖部分字段后的新参数"""
        return replace(self, **overrides)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IdmParams":
        return cls(**{key: float(value) for key, value in data.items()})


# 车辆参数预设（EV 取中等间距标定，ICE 取商用 ACC 标定，HDV 取人工驾驶标定）
PRESETS: Dict[VehicleType, IdmParams] = {
    VehicleType.EV_ACC: IdmParams(alpha=2.01, beta=8.97, kappa=4.02, eta=2.02, tau=1.63, v_d=33.34),
    VehicleType.ICE_ACC: IdmParams(alpha=0.60, beta=5.20, kappa=15.50, eta=6.30, tau=2.20, v_d=44.11),
    VehicleType.HDV: IdmParams(alpha=1.06, beta=2.00, kappa=4.00, eta=3.40, tau=1.26, v_d=30.00),
}


@dataclass(frozen=True, slots=True)
class AccelBounds:
    """加速度物理边界 [ξ, ρ] (m/s²)"""
    xi: float = -10.0
    rho: float = 5.0

    def __post_init__(self):
        if not self.xi < 0 < self.rho:
            raise ValueError(f"加速度边界无效: 需满足 ξ < 0 < ρ (当前 [{self.xi}, {self.rho}])")

    def clamp(self, accel: float) -> float:
        return min(max(accel, self.xi), self.rho)


DEFAULT_BOUNDS = AccelBounds()


def desired_spacing(p: IdmParams, v: float, dv: float) -> float:
    """
    计算期望间距 ŝ(v, Δv) = η + τv + vΔv / (2√(αβ))

    结果不做截断，可能为负；IDM 中的平方项会吸收符号。

    Args:
        p: IDM 参数
        v: 本车速度 (m/s)
        dv: 速度差 (m/s)，idm_accel 传入接近速率 v - v_pred

    Returns:
        float: 期望间距 (m)
    """
    return p.eta + p.tau * v + v * dv / (2.0 * math.sqrt(p.alpha * p.beta))


def idm_accel(
    p: IdmParams, v: float, s: float, dv: float, bounds: AccelBounds = DEFAULT_BOUNDS
) -> float:
    """
    IDM 加速度 α[1 - (v/v_d)^κ - (ŝ/s)²]，并截断到 [ξ, ρ]

    ŝ 按接近速率 -dv 计算：接近前车时期望间距增大、加速度减小。

    Args:
        p: IDM 参数
        v: 控制器使用的速度 (m/s)
        s: 控制器使用的间距 (m)，必须为正
        dv: 控制器使用的相对速度 v_pred - v (m/s)，负值表示正在接近前车
        bounds: 加速度边界

    Returns:
        float: 截断后的加速度 (m/s²)

    Raises:
        GapContractError: s <= 0
    """
    if not s > 0:
        raise GapContractError(f"间距必须为正: s = {s}")
    free_road = (v / p.v_d) ** p.kappa
    interaction = (desired_spacing(p, v, -dv) / s) ** 2
    return bounds.clamp(p.alpha * (1.0 - free_road - interaction))


def equilibrium_gap(p: IdmParams, v: float) -> float:
    """
    均匀流平衡间距：满足 idm_accel(p, v, g, 0) = 0 的 g

    Args:
        p: IDM 参数
        v: 平衡速度 (m/s)，需满足 0 <= v < v_d

    Returns:
        float: 平衡间距 (m)
    """
    if not 0 <= v < p.v_d:
        raise ValueError(f"平衡速度超出范围: 0 <= v < v_d (v = {v}, v_d = {p.v_d})")
    return desired_spacing(p, v, 0.0) / math.sqrt(1.0 - (v / p.v_d) ** p.kappa)
