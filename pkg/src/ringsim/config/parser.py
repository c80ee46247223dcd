"""
实验配置文档解析

负责：
- YAML 文档解析为 SimConfig（单次运行）或 SweepSpec（含 sweep 段）
- 默认值填充（来自 SimulationSettings）
- 未知键拒绝，错误附带行列号
- 配置回显 dump_config，可被 parse_config 重新解析
"""

import logging
from dataclasses import replace
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple, Union

import yaml

from ..attacks.spec import AttackKind, AttackSpec, NO_ATTACK
from ..dynamics.idm import AccelBounds, IdmParams, PRESETS, VehicleType
from ..dynamics.state import Powertrain
from ..scenarios.definitions import Phase, ScenarioConfigError, ScenarioDef, SimConfig, get_scenario
from ..tasks.sweep import FLEET_ORDER, SweepSpec
from .settings import SimulationSettings, get_settings

logger = logging.getLogger(__name__)

KeyPath = Tuple[Union[str, int], ...]

SIM_KEYS = {
    "scenario", "fleet", "n_vehicles", "ring_length", "vehicle_length", "dt", "duration",
    "initial_gap", "phases", "bounds", "params", "attack",
}
SWEEP_KEYS = {"scenarios", "fleets", "attacks", "output_dir"}
SCENARIO_KEYS = {"id", "acc_ids", "attacked_ids", "description"}
PHASE_KEYS = {"name", "start", "end", "closed"}
BOUNDS_KEYS = {"xi", "rho"}
PARAM_KEYS = {"alpha", "beta", "kappa", "eta", "tau", "v_d"}
ATTACK_KEYS = {
    "kind", "targets", "window", "delay_m", "blinded_p", "spacing_cap_phi", "ba_gaps_only",
    "gain_k", "angle_rate_omega", "ava_trig", "source_map",
}
PHASE_NAMES = ("pre", "during", "post")


class ConfigError(ValueError):
    """配置文档错误基类"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        location = f"第 {line} 行第 {column} 列: " if line is not None else ""
        super().__init__(f"{location}{message}")


class ConfigParseError(ConfigError):
    """文档格式错误或包含未知键"""


class ConfigValidationError(ConfigError):
    """字段值违反不变量"""

    def __init__(self, message: str, field: str, line: Optional[int] = None, column: Optional[int] = None):
        self.field = field
        super().__init__(f"{field}: {message}", line, column)


def _index_marks(node: yaml.Node, path: KeyPath = ()) -> Dict[KeyPath, yaml.Mark]:
    """记录每个键 / 序列元素在文档中的位置"""
    marks: Dict[KeyPath, yaml.Mark] = {path: node.start_mark}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = path + (key_node.value,)
            marks.update(_index_marks(value_node, child))
            marks[child] = key_node.start_mark
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            marks.update(_index_marks(item, path + (index,)))
    return marks


class _DocumentReader:
    """带位置信息的字段读取器"""

    def __init__(self, marks: Dict[KeyPath, yaml.Mark]):
        self.marks = marks

    def location(self, path: KeyPath) -> Tuple[Optional[int], Optional[int]]:
        while path:
            mark = self.marks.get(path)
            if mark is not None:
                return mark.line + 1, mark.column + 1
            path = path[:-1]
        return None, None

    @staticmethod
    def dotted(path: KeyPath) -> str:
        return ".".join(str(p) for p in path)

    def invalid(self, path: KeyPath, message: str) -> ConfigValidationError:
        line, column = self.location(path)
        return ConfigValidationError(message, self.dotted(path), line, column)

    def check_keys(self, data: Any, allowed: Iterable[str], path: KeyPath) -> Mapping[str, Any]:
        if not isinstance(data, Mapping):
            line, column = self.location(path)
            raise ConfigParseError(f"{self.dotted(path) or '文档'} 必须是映射", line, column)
        for key in data:
            if key not in allowed:
                line, column = self.location(path + (key,))
                raise ConfigParseError(f"未知配置键: {self.dotted(path + (key,))}", line, column)
        return data

    def number(self, value: Any, path: KeyPath) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.invalid(path, f"应为数值 (当前 {value!r})")
        return float(value)

    def integer(self, value: Any, path: KeyPath) -> int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.invalid(path, f"应为整数 (当前 {value!r})")
        return value

    def boolean(self, value: Any, path: KeyPath) -> bool:
        if not isinstance(value, bool):
            raise self.invalid(path, f"应为布尔值 (当前 {value!r})")
        return value

    def int_set(self, value: Any, path: KeyPath) -> frozenset:
        if not isinstance(value, (list, tuple)):
            raise self.invalid(path, f"应为整数列表 (当前 {value!r})")
        return frozenset(self.integer(item, path + (i,)) for i, item in enumerate(value))

    def pair(self, value: Any, path: KeyPath) -> Tuple[float, float]:
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise self.invalid(path, f"应为 [起始, 结束] (当前 {value!r})")
        return self.number(value[0], path + (0,)), self.number(value[1], path + (1,))


def _load(text: str) -> Tuple[Dict[str, Any], Dict[KeyPath, yaml.Mark]]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        line, column = (mark.line + 1, mark.column + 1) if mark is not None else (None, None)
        raise ConfigParseError(f"YAML 语法错误: {e.problem}", line, column) from e
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigParseError("配置文档顶层必须是映射", 1, 1)
    return data, _index_marks(node) if node is not None else {}


def _parse_scenario(reader: _DocumentReader, value: Any) -> ScenarioDef:
    path: KeyPath = ("scenario",)
    if isinstance(value, (str, int)) and not isinstance(value, bool):
        try:
            return get_scenario(str(value))
        except ScenarioConfigError as e:
            raise reader.invalid(path, str(e)) from e
    data = reader.check_keys(value, SCENARIO_KEYS, path)
    for required in ("id", "acc_ids", "attacked_ids"):
        if required not in data:
            raise reader.invalid(path + (required,), "缺少必填字段")
    try:
        return ScenarioDef(
            id=str(data["id"]),
            acc_ids=reader.int_set(data["acc_ids"], path + ("acc_ids",)),
            attacked_ids=reader.int_set(data["attacked_ids"], path + ("attacked_ids",)),
            description=str(data.get("description", "")),
        )
    except ScenarioConfigError as e:
        raise reader.invalid(path + ("attacked_ids",), str(e)) from e


def _parse_fleet(reader: _DocumentReader, value: Any, path: KeyPath) -> Powertrain:
    normalized = str(value).strip().upper()
    for powertrain in Powertrain:
        if powertrain.value == normalized:
            return powertrain
    raise reader.invalid(path, f"fleet ∈ {{EV, ICE}} (当前 {value!r})")


def _parse_phases(reader: _DocumentReader, value: Any) -> Tuple[Phase, ...]:
    path: KeyPath = ("phases",)
    if not isinstance(value, list) or not value:
        raise reader.invalid(path, "应为非空阶段列表")
    phases = []
    for index, item in enumerate(value):
        item_path = path + (index,)
        data = reader.check_keys(item, PHASE_KEYS, item_path)
        for required in ("start", "end"):
            if required not in data:
                raise reader.invalid(item_path + (required,), "缺少必填字段")
        phases.append(
            Phase(
                name=str(data.get("name", PHASE_NAMES[index] if index < len(PHASE_NAMES) else f"phase{index}")),
                start=reader.number(data["start"], item_path + ("start",)),
                end=reader.number(data["end"], item_path + ("end",)),
                closed=reader.boolean(data.get("closed", index == len(value) - 1), item_path + ("closed",)),
            )
        )
    return tuple(phases)


def default_phases(settings: SimulationSettings) -> Tuple[Phase, ...]:
    """按阶段边界生成 pre / during / post，最后一段闭合"""
    edges = settings.phase_edges
    return tuple(
        Phase(name, edges[i], edges[i + 1], closed=(i == len(PHASE_NAMES) - 1))
        for i, name in enumerate(PHASE_NAMES)
    )


def _vehicle_type(reader: _DocumentReader, key: Any, path: KeyPath) -> VehicleType:
    normalized = str(key).strip().upper().replace("_", "-")
    for vehicle_type in VehicleType:
        if vehicle_type.value == normalized:
            return vehicle_type
    line, column = reader.location(path)
    raise ConfigParseError(f"未知车辆类型: {reader.dotted(path)} (可选 EV-ACC, ICE-ACC, HDV)", line, column)


def _parse_params(reader: _DocumentReader, value: Any) -> Dict[VehicleType, IdmParams]:
    path: KeyPath = ("params",)
    params = dict(PRESETS)
    if not isinstance(value, Mapping):
        raise reader.invalid(path, "应为 车辆类型 -> 参数 的映射")
    for key, overrides in value.items():
        type_path = path + (key,)
        vehicle_type = _vehicle_type(reader, key, type_path)
        data = reader.check_keys(overrides, PARAM_KEYS, type_path)
        numbers = {name: reader.number(v, type_path + (name,)) for name, v in data.items()}
        try:
            params[vehicle_type] = params[vehicle_type].with_overrides(**numbers)
        except ValueError as e:
            raise reader.invalid(type_path, str(e)) from e
    return params


def _parse_attack(
    reader: _DocumentReader, value: Any, path: KeyPath, default_window: Tuple[float, float]
) -> AttackSpec:
    data = reader.check_keys(value, ATTACK_KEYS, path)
    kind_value = data.get("kind")
    try:
        kind = AttackKind.NONE if kind_value is None else AttackKind.parse(kind_value)
    except ValueError as e:
        raise reader.invalid(path + ("kind",), str(e)) from e

    fields: Dict[str, Any] = {"kind": kind, "window": default_window}
    if "targets" in data:
        fields["targets"] = reader.int_set(data["targets"], path + ("targets",))
    if "window" in data:
        fields["window"] = reader.pair(data["window"], path + ("window",))
    for name in ("delay_m", "spacing_cap_phi", "gain_k", "angle_rate_omega"):
        if name in data:
            fields[name] = reader.number(data[name], path + (name,))
    if "blinded_p" in data:
        fields["blinded_p"] = reader.integer(data["blinded_p"], path + ("blinded_p",))
    if "ba_gaps_only" in data:
        fields["ba_gaps_only"] = reader.boolean(data["ba_gaps_only"], path + ("ba_gaps_only",))
    if "ava_trig" in data:
        fields["ava_trig"] = str(data["ava_trig"]).strip().lower()
    if "source_map" in data:
        source_path = path + ("source_map",)
        mapping = data["source_map"]
        if not isinstance(mapping, Mapping):
            raise reader.invalid(source_path, "应为 目标 -> 信息源 的映射")
        fields["source_map"] = tuple(
            sorted(
                (reader.integer(k, source_path + (k,)), reader.integer(v, source_path + (k,)))
                for k, v in mapping.items()
            )
        )
    return AttackSpec(**fields)


def _parse_base(
    reader: _DocumentReader, data: Mapping[str, Any], settings: SimulationSettings
) -> SimConfig:
    """解析运行参数（不含 scenario / fleet / attack）"""
    n_vehicles = reader.integer(data.get("n_vehicles", settings.n_vehicles), ("n_vehicles",))
    fields: Dict[str, Any] = {
        "scenario": get_scenario("I"),
        "n_vehicles": n_vehicles,
        "ring_length": reader.number(data.get("ring_length", settings.ring_length), ("ring_length",)),
        "vehicle_length": reader.number(data.get("vehicle_length", settings.vehicle_length), ("vehicle_length",)),
        "dt": reader.number(data.get("dt", settings.dt), ("dt",)),
        "duration": reader.number(data.get("duration", settings.duration), ("duration",)),
        "phases": _parse_phases(reader, data["phases"]) if "phases" in data else default_phases(settings),
        "params": _parse_params(reader, data["params"]) if "params" in data else dict(PRESETS),
    }
    if "initial_gap" in data:
        fields["initial_gap"] = reader.number(data["initial_gap"], ("initial_gap",))

    bounds = data.get("bounds", {"xi": settings.accel_min, "rho": settings.accel_max})
    bounds = reader.check_keys(bounds, BOUNDS_KEYS, ("bounds",))
    xi = reader.number(bounds.get("xi", settings.accel_min), ("bounds", "xi"))
    rho = reader.number(bounds.get("rho", settings.accel_max), ("bounds", "rho"))
    try:
        fields["bounds"] = AccelBounds(xi=xi, rho=rho)
    except ValueError as e:
        raise reader.invalid(("bounds",), str(e)) from e
    return SimConfig(**fields)


def _validate_config(
    reader: _DocumentReader, config: SimConfig, attack_path: KeyPath = ("attack",)
) -> SimConfig:
    """
    校验已补全攻击目标的配置，错误定位到具体字段

    Args:
        attack_path: 攻击段在文档中的路径（扫描配置中为 sweep.attacks[i]）
    """
    try:
        config.validate()
    except ScenarioConfigError as e:
        message = str(e)
        head = message.split(" ")[0].rstrip(":")
        if head.startswith("attack."):
            field = head.split(".", 1)[1]
            path: KeyPath = attack_path + (field,) if field in ATTACK_KEYS else attack_path
        elif head in SIM_KEYS:
            path = (head,)
        else:
            path = ("config",)
        raise reader.invalid(path, message) from e
    return config


def parse_config(
    text: str, settings: Optional[SimulationSettings] = None
) -> Union[SimConfig, SweepSpec]:
    """
    解析实验配置文档

    含 sweep 段的文档解析为 SweepSpec，否则解析为 SimConfig。

    Args:
        text: YAML 文档
        settings: 仿真默认值，默认取全局设置

    Returns:
        SimConfig | SweepSpec: 已填充默认值并通过校验的配置

    Raises:
        ConfigParseError: 语法错误或未知键（附行列号）
        ConfigValidationError: 字段值违反不变量（附字段名）
    """
    settings = settings or get_settings().simulation
    data, marks = _load(text)
    reader = _DocumentReader(marks)
    default_window = (settings.attack_window[0], settings.attack_window[1])

    if "sweep" in data:
        reader.check_keys(data, SIM_KEYS - {"scenario", "fleet", "attack"} | {"sweep"}, ())
        return _parse_sweep(reader, data, settings, default_window)

    reader.check_keys(data, SIM_KEYS, ())
    if "scenario" not in data:
        raise reader.invalid(("scenario",), "缺少必填字段")
    base = _parse_base(reader, data, settings)
    scenario = _parse_scenario(reader, data["scenario"])
    fleet = _parse_fleet(reader, data.get("fleet", "EV"), ("fleet",))
    attack = (
        _parse_attack(reader, data["attack"], ("attack",), default_window) if "attack" in data else NO_ATTACK
    )
    config = replace(base, scenario=scenario, fleet_powertrain=fleet, attack=attack)
    logger.debug(f"配置解析完成: 场景 {scenario.id}, 车队 {fleet.value}, 攻击 {attack.label}")
    return _validate_config(reader, config)


def _parse_sweep(
    reader: _DocumentReader,
    data: Mapping[str, Any],
    settings: SimulationSettings,
    default_window: Tuple[float, float],
) -> SweepSpec:
    base = _validate_config(reader, _parse_base(reader, data, settings))
    sweep = reader.check_keys(data["sweep"], SWEEP_KEYS, ("sweep",))

    scenarios = sweep.get("scenarios", ["I", "II", "III", "IV"])
    if not isinstance(scenarios, list) or not scenarios:
        raise reader.invalid(("sweep", "scenarios"), "应为非空场景列表")
    scenario_ids = []
    for index, value in enumerate(scenarios):
        try:
            scenario_ids.append(get_scenario(str(value)).id)
        except ScenarioConfigError as e:
            raise reader.invalid(("sweep", "scenarios", index), str(e)) from e

    fleets_value = sweep.get("fleets", [f.value for f in FLEET_ORDER])
    if not isinstance(fleets_value, list) or not fleets_value:
        raise reader.invalid(("sweep", "fleets"), "应为非空车队列表")
    fleets = tuple(_parse_fleet(reader, v, ("sweep", "fleets", i)) for i, v in enumerate(fleets_value))

    attacks_value = sweep.get("attacks", [{"kind": "None"}])
    if not isinstance(attacks_value, list) or not attacks_value:
        raise reader.invalid(("sweep", "attacks"), "应为非空攻击列表")
    attacks = []
    for index, value in enumerate(attacks_value):
        path: KeyPath = ("sweep", "attacks", index)
        attack = _parse_attack(reader, value, path, default_window)
        # 未指定目标的攻击按每个场景分别补全后校验
        for scenario_id in scenario_ids:
            _validate_config(reader, replace(base, scenario=get_scenario(scenario_id), attack=attack), path)
        attacks.append(attack)

    output_dir = sweep.get("output_dir")
    return SweepSpec(
        scenarios=tuple(scenario_ids),
        fleets=fleets,
        attacks=tuple(attacks),
        output_dir=str(output_dir) if output_dir is not None else None,
        base=base,
    )


def dump_config(config: SimConfig) -> str:
    """配置回显为 YAML 文本"""
    return yaml.safe_dump(config.to_dict(), sort_keys=False, allow_unicode=True)
