"""
实验扫描任务

负责：
- 场景 × 车队 × 攻击 的笛卡尔运行集合
- 线程池并行执行、单次失败不中断
- 结果按运行键排序，保证与并行度无关
- 内置的复现实验网格
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

from ..analysis.metrics import PhaseMetrics, phase_metrics
from ..analysis.risk import (
    FleetComparison,
    FleetOutcome,
    IncompleteOutcomeError,
    RiskClass,
    classify_risk,
    compare_fleets,
)
from ..attacks.spec import AttackKind, AttackSpec, NO_ATTACK
from ..dynamics.state import Powertrain
from ..file_manager import OutputManager
from ..logging_config import RunMetricsCollector, log_performance
from ..scenarios.definitions import SCENARIO_ORDER, ScenarioConfigError, SimConfig, get_scenario
from ..scenarios.engine import Collision, fleet_label, run
from .parallel_processor import run_parallel

logger = logging.getLogger(__name__)

FLEET_ORDER: Tuple[Powertrain, ...] = (Powertrain.EV, Powertrain.ICE)


@dataclass(frozen=True)
class SweepSpec:
    """扫描配置，运行集合为三个轴的笛卡尔积"""
    scenarios: Tuple[str, ...] = SCENARIO_ORDER
    fleets: Tuple[Powertrain, ...] = FLEET_ORDER
    attacks: Tuple[AttackSpec, ...] = (NO_ATTACK,)
    output_dir: Optional[str] = None
    base: SimConfig = field(default_factory=lambda: SimConfig(scenario=get_scenario("I")))

    def validate(self) -> None:
        """
        校验扫描配置

        Raises:
            ScenarioConfigError: 轴为空或场景未知
        """
        for axis in ("scenarios", "fleets", "attacks"):
            if not getattr(self, axis):
                raise ScenarioConfigError(f"sweep.{axis} 不能为空")
        for scenario_id in self.scenarios:
            get_scenario(scenario_id)

    def run_configs(self) -> List[Tuple["RunKey", SimConfig]]:
        """展开为 (运行键, 仿真配置) 列表，按 (攻击, 场景, 车队) 排序"""
        runs = []
        for attack_index, attack in enumerate(self.attacks):
            for scenario_id in self.scenarios:
                scenario = get_scenario(scenario_id)
                for fleet in self.fleets:
                    config = replace(self.base, scenario=scenario, fleet_powertrain=fleet, attack=attack)
                    key = RunKey(
                        attack_index=attack_index,
                        attack=config.attack.label,
                        kind=config.attack.kind,
                        scenario=scenario.id,
                        fleet=fleet_label(fleet),
                        slug=config.attack.slug,
                    )
                    runs.append((key, config))
        return runs


@dataclass(frozen=True)
class RunKey:
    """运行键：(攻击, 场景, 车队)"""
    attack_index: int
    attack: str
    kind: AttackKind
    scenario: str
    fleet: str
    slug: str

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        return (
            self.attack_index,
            SCENARIO_ORDER.index(self.scenario) if self.scenario in SCENARIO_ORDER else len(SCENARIO_ORDER),
            0 if self.fleet == "EV" else 1,
        )

    @property
    def run_name(self) -> str:
        """文件名：序号_攻击_场景_车队"""
        return f"{self.attack_index:02d}_{self.slug}_{self.scenario}_{self.fleet}"


@dataclass(frozen=True)
class RunRecord:
    """单次运行的汇总（不保留完整轨迹）"""
    key: RunKey
    metrics: Tuple[PhaseMetrics, ...] = ()
    collision: Optional[Collision] = None
    n_ticks: int = 0
    trajectory_path: Optional[str] = None
    error: Optional[str] = None

    @property
    def success(self) -> bool:
        return self.error is None

    @property
    def collided(self) -> bool:
        return self.collision is not None


@dataclass(frozen=True)
class SweepOutput:
    """扫描结果，records 按运行键排序"""
    spec: SweepSpec
    records: Tuple[RunRecord, ...]
    stats: Dict[str, object] = field(default_factory=dict)

    @property
    def failures(self) -> Tuple[RunRecord, ...]:
        return tuple(r for r in self.records if not r.success)

    def by_attack(self) -> Dict[int, List[RunRecord]]:
        """按攻击序号分组（保持扫描顺序）"""
        groups: Dict[int, List[RunRecord]] = {}
        for record in self.records:
            groups.setdefault(record.key.attack_index, []).append(record)
        return groups

    def kinds(self) -> List[AttackKind]:
        """扫描中出现的攻击类型（按首次出现顺序，不含 baseline）"""
        seen: List[AttackKind] = []
        for record in self.records:
            if record.key.kind is not AttackKind.NONE and record.key.kind not in seen:
                seen.append(record.key.kind)
        return seen

    def collision_outcomes(self, kind: AttackKind) -> Dict[str, bool]:
        """某类攻击在各场景是否发生碰撞（任一车队、任一参数组）"""
        outcomes: Dict[str, bool] = {}
        for record in self.records:
            if record.key.kind is kind and record.success:
                outcomes[record.key.scenario] = outcomes.get(record.key.scenario, False) or record.collided
        return outcomes

    def risk_classes(self) -> Dict[AttackKind, RiskClass]:
        """对覆盖全部四个场景的攻击类型给出风险等级"""
        classes: Dict[AttackKind, RiskClass] = {}
        for kind in self.kinds():
            try:
                classes[kind] = classify_risk(self.collision_outcomes(kind))
            except IncompleteOutcomeError as e:
                logger.warning(f"{kind.value} 无法分级: {e}")
        return classes

    def fleet_comparison(self, kind: AttackKind) -> FleetComparison:
        """某类攻击全部运行的 EV / ICE 对比"""
        outcomes = [
            FleetOutcome(
                fleet=record.key.fleet,
                metrics=record.metrics,
                collision_time=record.collision.time if record.collision else None,
            )
            for record in self.records
            if record.key.kind is kind and record.success
        ]
        return compare_fleets(outcomes)


def execute_run(
    key: RunKey,
    config: SimConfig,
    output: Optional[OutputManager] = None,
    plot_data: bool = False,
) -> RunRecord:
    """
    执行单次仿真并计算阶段指标，按需写出轨迹与绘图数据

    Args:
        key: 运行键
        config: 仿真配置
        output: 输出管理器，None 时不写文件
        plot_data: 是否写出绘图序列

    Returns:
        RunRecord: 运行汇总
    """
    result = run(config)
    trajectory_path = None
    if output is not None:
        trajectory_path = str(output.save_trajectory(result, key.run_name))
        if plot_data:
            output.save_plot_data(result, key.run_name)
    return RunRecord(
        key=key,
        metrics=phase_metrics(result),
        collision=result.collision,
        n_ticks=result.trajectory.n_ticks,
        trajectory_path=trajectory_path,
    )


@log_performance
def run_sweep(
    spec: SweepSpec,
    parallelism: int = 1,
    output: Optional[OutputManager] = None,
    plot_data: bool = False,
) -> SweepOutput:
    """
    执行扫描

    单次运行失败会被记录在对应 RunRecord.error 中，不会中断其余运行。
    结果顺序与并行度、完成顺序无关。

    Args:
        spec: 扫描配置
        parallelism: 并行线程数
        output: 输出管理器
        plot_data: 是否写出绘图序列

    Returns:
        SweepOutput: 排序后的运行结果
    """
    spec.validate()
    if parallelism < 1:
        raise ValueError(f"parallelism 必须 >= 1 (当前 {parallelism})")

    runs = spec.run_configs()
    logger.info(f"开始扫描: 共 {len(runs)} 次运行, 并行度 {parallelism}")

    keys = {key.run_name: key for key, _ in runs}
    tasks = [(key.run_name, execute_run, (key, config, output, plot_data)) for key, config in runs]
    task_results = run_parallel(tasks, max_workers=parallelism)

    collector = RunMetricsCollector()
    records: List[RunRecord] = []
    for run_name, key in keys.items():
        task = task_results.get(run_name)
        if task is None:
            collector.record_failure()
            records.append(RunRecord(key=key, error="任务未完成"))
        elif not task.success:
            collector.record_failure()
            records.append(RunRecord(key=key, error=task.error))
        else:
            collector.record_run(task.execution_time, task.result.collided)
            records.append(task.result)

    records.sort(key=lambda r: r.key.sort_key)
    stats = collector.get_metrics()
    logger.info(
        f"扫描完成: 运行 {stats['runs']} 次, 碰撞 {stats['collisions']} 次, 失败 {stats['failures']} 次"
    )
    return SweepOutput(spec=spec, records=tuple(records), stats=stats)


def reproduction_attacks(window: Tuple[float, float] = (60.0, 90.0)) -> Tuple[AttackSpec, ...]:
    """复现实验使用的攻击参数组：baseline 与六类攻击"""
    return (
        NO_ATTACK,
        AttackSpec(kind=AttackKind.DPDA, window=window, delay_m=6.0),
        AttackSpec(kind=AttackKind.DPDA, window=window, delay_m=8.0),
        AttackSpec(kind=AttackKind.DPDA, window=window, delay_m=9.0),
        AttackSpec(kind=AttackKind.PA, window=window),
        AttackSpec(kind=AttackKind.FA, window=window),
        AttackSpec(kind=AttackKind.BA, window=window, blinded_p=2, spacing_cap_phi=50.0, ba_gaps_only=True),
        AttackSpec(kind=AttackKind.AVA, window=window, gain_k=0.002),
        AttackSpec(kind=AttackKind.MA, window=window, delay_m=9.0),
    )


def reproduction_spec(
    base: Optional[SimConfig] = None,
    window: Tuple[float, float] = (60.0, 90.0),
    output_dir: Optional[str] = None,
) -> SweepSpec:
    """4 个场景 × 2 种车队 × 9 组攻击参数"""
    return SweepSpec(
        scenarios=SCENARIO_ORDER,
        fleets=FLEET_ORDER,
        attacks=reproduction_attacks(window),
        output_dir=output_dir,
        base=base or SimConfig(scenario=get_scenario("I")),
    )


def select_attacks(spec: SweepSpec, kinds: Sequence[AttackKind]) -> SweepSpec:
    """只保留指定类型的攻击（baseline 始终保留）"""
    wanted = set(kinds) | {AttackKind.NONE}
    return replace(spec, attacks=tuple(a for a in spec.attacks if a.kind in wanted))
