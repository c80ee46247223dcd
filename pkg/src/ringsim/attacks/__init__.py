"""通信类网络攻击注入"""

from .spec import ATTACK_KINDS, AttackKind, AttackSpec, ControllerInputs, NO_ATTACK
from .injectors import (
    PERCEIVED_SPACING_FLOOR,
    WorldView,
    ava_inputs,
    ba_inputs,
    ba_perceived_spacing,
    controller_inputs,
    dpda_inputs,
    fa_inputs,
    information_matrix,
    is_active,
    ma_inputs,
    pa_inputs,
    true_inputs,
)

__all__ = [
    "ATTACK_KINDS",
    "AttackKind",
    "AttackSpec",
    "ControllerInputs",
    "NO_ATTACK",
    "PERCEIVED_SPACING_FLOOR",
    "WorldView",
    "ava_inputs",
    "ba_inputs",
    "ba_perceived_spacing",
    "controller_inputs",
    "dpda_inputs",
    "fa_inputs",
    "information_matrix",
    "is_active",
    "ma_inputs",
    "pa_inputs",
    "true_inputs",
]
