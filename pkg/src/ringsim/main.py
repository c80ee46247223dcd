#!/usr/bin/env python3
"""
环形道路 ACC 网络攻击仿真器主入口

这是应用程序的命令行入口，负责：
1. 初始化配置和日志
2. 解析命令行参数（run / sweep / reproduce 子命令）
3. 协调仿真、扫描和报告输出
4. 处理错误并返回退出码
"""

import sys
import argparse
import logging
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import yaml

from . import __version__
from .analysis.metrics import phase_metrics
from .attacks.injectors import information_matrix
from .attacks.spec import ATTACK_KINDS, AttackKind, AttackSpec, NO_ATTACK
from .config import config_manager, reload_settings
from .config.parser import ConfigError, dump_config, parse_config
from .config.settings import LOG_LEVELS, TRAJECTORY_FORMATS, Settings
from .dynamics.state import Powertrain
from .file_manager import OutputManager
from .logging_config import setup_logging
from .reporting.report import emit_report
from .scenarios.definitions import SCENARIO_ORDER, ScenarioConfigError, SimConfig, get_scenario
from .scenarios.engine import RunResult, fleet_label, run
from .tasks.sweep import (
    FLEET_ORDER,
    SweepOutput,
    SweepSpec,
    reproduction_spec,
    run_sweep,
    select_attacks,
)

logger = logging.getLogger(__name__)

ATTACK_CHOICES = [kind.value for kind in ATTACK_KINDS]
FLEET_CHOICES = [fleet.value for fleet in FLEET_ORDER]


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    """三个子命令共用的选项"""
    config_group = parser.add_argument_group("配置选项")
    config_group.add_argument(
        "--settings",
        type=str,
        help="应用配置文件 (JSON / YAML)，合并到默认配置之上"
    )
    config_group.add_argument(
        "--log-level",
        choices=LOG_LEVELS,
        help="日志级别"
    )
    config_group.add_argument(
        "--log-file",
        type=str,
        help="日志文件路径，空字符串表示只输出到控制台"
    )
    config_group.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="详细输出"
    )
    config_group.add_argument(
        "-q", "--quiet",
        action="store_true",
        help="静默模式"
    )

    output_group = parser.add_argument_group("输出选项")
    output_group.add_argument(
        "-o", "--out",
        type=str,
        help="输出目录 (默认: output.output_dir)"
    )
    output_group.add_argument(
        "--trajectory-format",
        choices=TRAJECTORY_FORMATS,
        help="轨迹文件格式 (默认: csv)"
    )
    output_group.add_argument(
        "--plot-data",
        action="store_true",
        help="写出每辆车的 (t, 速度) 与 (t, 间距) 序列"
    )
    output_group.add_argument(
        "--no-trajectories",
        action="store_true",
        help="不写出轨迹文件"
    )


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="ringsim",
        description="环形道路混合交通 ACC 网络攻击仿真器",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  %(prog)s run --scenario IV --fleet EV --attack DPDA --delay 6
  %(prog)s run -c experiment.yaml --out output/iv_dpda
  %(prog)s sweep --scenario I II --attack DPDA --delay 6 8 9 --parallel 4
  %(prog)s reproduce --out output/reproduce --parallel 8
        """
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    # 单次仿真
    run_parser = subparsers.add_parser("run", help="执行单次仿真")
    experiment_group = run_parser.add_argument_group("实验选项")
    experiment_group.add_argument(
        "-c", "--config",
        type=str,
        help="实验配置文件 (YAML)"
    )
    experiment_group.add_argument(
        "--scenario",
        type=str.upper,
        choices=SCENARIO_ORDER,
        help="场景编号 (默认: I)"
    )
    experiment_group.add_argument(
        "--fleet",
        type=str.upper,
        choices=FLEET_CHOICES,
        help="ACC 车队动力类型 (默认: EV)"
    )
    experiment_group.add_argument(
        "--attack",
        type=str.upper,
        choices=ATTACK_CHOICES,
        help="攻击类型，未指定参数时使用预设值"
    )
    experiment_group.add_argument(
        "--delay",
        type=float,
        help="DPDA / MA 的延迟 m (秒)"
    )
    experiment_group.add_argument(
        "--ba-gaps-only",
        action="store_true",
        help="BA 感知间距只累加净间距，不计被忽略车辆的车长"
    )
    _add_common_options(run_parser)

    # 扫描
    sweep_parser = subparsers.add_parser("sweep", help="执行 场景 × 车队 × 攻击 扫描")
    grid_group = sweep_parser.add_argument_group("扫描选项")
    grid_group.add_argument(
        "-c", "--config",
        type=str,
        help="扫描配置文件 (YAML，含 sweep 段)"
    )
    grid_group.add_argument(
        "--scenario",
        type=str.upper,
        nargs="+",
        choices=SCENARIO_ORDER,
        help="场景编号列表 (默认: 全部)"
    )
    grid_group.add_argument(
        "--fleet",
        type=str.upper,
        nargs="+",
        choices=FLEET_CHOICES,
        help="车队列表 (默认: EV ICE)"
    )
    grid_group.add_argument(
        "--attack",
        type=str.upper,
        nargs="+",
        choices=ATTACK_CHOICES,
        help="攻击类型列表，baseline 始终包含"
    )
    grid_group.add_argument(
        "--delay",
        type=float,
        nargs="+",
        help="DPDA / MA 的延迟列表，每个值生成一组攻击参数"
    )
    grid_group.add_argument(
        "--ba-gaps-only",
        action="store_true",
        help="所有 BA 攻击只累加净间距"
    )
    grid_group.add_argument(
        "-p", "--parallel",
        type=int,
        help="并行线程数 (默认: sweep.parallel_workers)"
    )
    _add_common_options(sweep_parser)

    # 复现实验
    reproduce_parser = subparsers.add_parser("reproduce", help="执行内置的复现实验网格")
    reproduce_group = reproduce_parser.add_argument_group("复现选项")
    reproduce_group.add_argument(
        "--attack",
        type=str.upper,
        nargs="+",
        choices=ATTACK_CHOICES,
        help="只运行指定攻击类型 (baseline 始终包含)"
    )
    reproduce_group.add_argument(
        "-p", "--parallel",
        type=int,
        help="并行线程数 (默认: sweep.parallel_workers)"
    )
    _add_common_options(reproduce_parser)

    return parser


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """解析命令行参数

    Args:
        argv: 参数列表，None 时读取 sys.argv

    Returns:
        解析后的参数
    """
    return build_parser().parse_args(argv)


def validate_arguments(args: argparse.Namespace) -> bool:
    """验证命令行参数

    Args:
        args: 解析后的参数

    Returns:
        参数是否有效
    """
    config_path = getattr(args, "config", None)
    if config_path and not Path(config_path).is_file():
        logger.error(f"实验配置文件不存在: {config_path}")
        return False

    if args.settings and not Path(args.settings).is_file():
        logger.error(f"应用配置文件不存在: {args.settings}")
        return False

    if args.verbose and args.quiet:
        logger.error("--verbose 和 --quiet 不能同时使用")
        return False

    parallel = getattr(args, "parallel", None)
    if parallel is not None and parallel <= 0:
        logger.error("并行线程数必须大于 0")
        return False

    delays = getattr(args, "delay", None)
    if delays is not None:
        values = delays if isinstance(delays, list) else [delays]
        if any(value < 0 for value in values):
            logger.error("delay_m ≥ 0")
            return False

    return True


def apply_cli_overrides(args: argparse.Namespace) -> Settings:
    """应用命令行参数覆盖配置，并重新配置日志

    Args:
        args: 解析后的参数

    Returns:
        覆盖后的设置
    """
    if args.settings:
        config_manager.merge_file(args.settings)
        logger.info(f"加载应用配置文件: {args.settings}")

    overrides = {}

    # 输出设置
    if args.trajectory_format:
        overrides['output.trajectory_format'] = args.trajectory_format
    if args.plot_data:
        overrides['output.plot_data'] = True
    if args.no_trajectories:
        overrides['output.write_trajectories'] = False

    # 扫描设置
    if getattr(args, "parallel", None):
        overrides['sweep.parallel_workers'] = args.parallel

    # 日志设置
    level = None
    if args.log_level:
        level = args.log_level
    elif args.verbose:
        level = 'DEBUG'
    elif args.quiet:
        level = 'WARNING'
    if level:
        overrides['logging.level'] = level
        overrides['logging.console_level'] = level
    if args.log_file is not None:
        overrides['logging.file'] = args.log_file

    for key, value in overrides.items():
        config_manager.set(key, value)
        logger.debug(f"覆盖配置: {key} = {value}")

    settings = reload_settings()
    setup_logging(settings.logging)
    return settings


def attack_preset(
    kind: AttackKind,
    window: Tuple[float, float],
    delay: Optional[float] = None,
    ba_gaps_only: bool = False,
) -> AttackSpec:
    """
    命令行攻击参数：DPDA m=6、MA m=9、BA p=2 φ=50，其余类型使用默认参数

    Args:
        kind: 攻击类型
        window: 攻击窗口
        delay: DPDA / MA 的延迟，None 时使用预设
        ba_gaps_only: BA 是否只累加净间距

    Returns:
        AttackSpec: 未指定目标的攻击配置（由场景补全）
    """
    if kind is AttackKind.NONE:
        return NO_ATTACK
    if kind is AttackKind.DPDA:
        return AttackSpec(kind=kind, window=window, delay_m=6.0 if delay is None else delay)
    if kind is AttackKind.MA:
        return AttackSpec(kind=kind, window=window, delay_m=9.0 if delay is None else delay)
    if kind is AttackKind.BA:
        return AttackSpec(
            kind=kind, window=window, blinded_p=2, spacing_cap_phi=50.0, ba_gaps_only=ba_gaps_only
        )
    return AttackSpec(kind=kind, window=window)


def default_base(settings: Settings) -> SimConfig:
    """由应用设置生成的默认仿真配置（场景 I、EV、无攻击）"""
    return parse_config(yaml.safe_dump({"scenario": "I"}), settings.simulation)


def _attack_window(settings: Settings) -> Tuple[float, float]:
    window = settings.simulation.attack_window
    return (float(window[0]), float(window[1]))


def build_run_config(args: argparse.Namespace, settings: Settings) -> SimConfig:
    """
    组合实验配置文件与命令行参数，得到单次仿真配置

    Raises:
        ConfigError: 配置文件无效或不是单次仿真配置
        ScenarioConfigError: 覆盖后的配置违反不变量
    """
    if args.config:
        parsed = parse_config(Path(args.config).read_text(encoding="utf-8"), settings.simulation)
        if not isinstance(parsed, SimConfig):
            raise ConfigError("run 需要单次仿真配置，扫描配置请使用 sweep 子命令")
        config = parsed
    else:
        config = default_base(settings)

    attack = config.attack
    if args.attack:
        attack = attack_preset(
            AttackKind.parse(args.attack), _attack_window(settings), args.delay, args.ba_gaps_only
        )
    else:
        if args.delay is not None:
            if attack.kind not in (AttackKind.DPDA, AttackKind.MA):
                raise ScenarioConfigError("--delay 只适用于 DPDA / MA 攻击")
            attack = replace(attack, delay_m=args.delay)
        if args.ba_gaps_only and attack.kind is AttackKind.BA:
            attack = replace(attack, ba_gaps_only=True)
        if args.scenario:
            # 目标集合随新场景重新补全
            attack = attack.with_targets(())

    overrides = {"attack": attack}
    if args.scenario:
        overrides["scenario"] = get_scenario(args.scenario)
    if args.fleet:
        overrides["fleet_powertrain"] = Powertrain(args.fleet)
    config = replace(config, **overrides)
    config.validate()
    return config


def _sweep_attacks(args: argparse.Namespace, settings: Settings) -> Tuple[AttackSpec, ...]:
    window = _attack_window(settings)
    attacks: List[AttackSpec] = [NO_ATTACK]
    for name in args.attack or []:
        kind = AttackKind.parse(name)
        if kind in (AttackKind.DPDA, AttackKind.MA) and args.delay:
            attacks.extend(attack_preset(kind, window, delay) for delay in args.delay)
        else:
            attacks.append(attack_preset(kind, window, ba_gaps_only=args.ba_gaps_only))
    return tuple(attacks)


def build_sweep_spec(args: argparse.Namespace, settings: Settings) -> SweepSpec:
    """
    组合扫描配置文件与命令行参数

    Raises:
        ConfigError: 配置文件无效或不是扫描配置
    """
    if args.config:
        parsed = parse_config(Path(args.config).read_text(encoding="utf-8"), settings.simulation)
        if not isinstance(parsed, SweepSpec):
            raise ConfigError("sweep 需要含 sweep 段的扫描配置")
        spec = parsed
        if args.attack:
            spec = replace(spec, attacks=_sweep_attacks(args, settings))
    else:
        spec = SweepSpec(base=default_base(settings), attacks=_sweep_attacks(args, settings))

    if args.scenario:
        spec = replace(spec, scenarios=tuple(args.scenario))
    if args.fleet:
        spec = replace(spec, fleets=tuple(Powertrain(f) for f in args.fleet))
    if args.ba_gaps_only:
        spec = replace(
            spec,
            attacks=tuple(
                replace(a, ba_gaps_only=True) if a.kind is AttackKind.BA else a for a in spec.attacks
            ),
        )
    if args.out:
        spec = replace(spec, output_dir=args.out)
    return spec


def build_reproduce_spec(args: argparse.Namespace, settings: Settings) -> SweepSpec:
    """内置复现实验网格，可按攻击类型筛选"""
    spec = reproduction_spec(
        base=default_base(settings), window=_attack_window(settings), output_dir=args.out
    )
    if args.attack:
        spec = select_attacks(spec, [AttackKind.parse(name) for name in args.attack])
    return spec


def run_summary(result: RunResult, run_name: str) -> dict:
    """单次仿真摘要（写入 summary.json）"""
    config = result.config
    collision = result.collision
    return {
        "run": run_name,
        "scenario": config.scenario.id,
        "fleet": fleet_label(config.fleet_powertrain),
        "attack": config.attack.label,
        "ticks": result.trajectory.n_ticks,
        "end_time": result.trajectory.end_time,
        "collision": None if collision is None else {
            "time": collision.time,
            "follower": collision.follower,
            "leader": collision.leader,
        },
        # 第 i 项为车辆 i 的信息来源车辆（PA / MA 目标为篡改后的来源）
        "information_sources": information_matrix(config.attack, config.n_vehicles).argmax(axis=1).tolist(),
        "phases": [metrics.to_dict() for metrics in phase_metrics(result)],
    }


def run_single(args: argparse.Namespace, settings: Settings) -> bool:
    """执行单次仿真并写出结果

    Returns:
        是否成功（碰撞属于仿真结果，不算失败）
    """
    config = build_run_config(args, settings)
    result = run(config)

    output = OutputManager(args.out or settings.output.output_dir, settings.output.trajectory_format)
    run_name = f"{config.attack.slug}_{config.scenario.id}_{fleet_label(config.fleet_powertrain)}"
    if settings.output.write_trajectories:
        output.save_trajectory(result, run_name)
    if settings.output.plot_data:
        output.save_plot_data(result, run_name)
    output.save_text("config.yaml", dump_config(config))
    summary = run_summary(result, run_name)
    output.save_json("summary.json", summary)

    if result.collision is not None:
        collision = result.collision
        print(
            f"{run_name}: 碰撞 t={collision.time:.3f}s "
            f"(车辆 {collision.follower} 追尾车辆 {collision.leader})"
        )
    else:
        print(f"{run_name}: 无碰撞, 共 {result.trajectory.n_ticks} 个 tick")
    return True


def _write_sweep_outputs(output: SweepOutput, manager: OutputManager, settings: Settings) -> None:
    report = emit_report(output)
    manager.save_text(settings.output.report_name, report)
    manager.save_json(
        "runs.json",
        {
            "runs": [
                {
                    "run": record.key.run_name,
                    "attack": record.key.attack,
                    "scenario": record.key.scenario,
                    "fleet": record.key.fleet,
                    "ticks": record.n_ticks,
                    "collision_time": record.collision.time if record.collision else None,
                    "error": record.error,
                    "phases": [metrics.to_dict() for metrics in record.metrics],
                }
                for record in output.records
            ]
        },
    )


def run_grid(spec: SweepSpec, settings: Settings) -> bool:
    """执行扫描并写出报告

    Returns:
        是否全部运行成功
    """
    manager = OutputManager(spec.output_dir or settings.output.output_dir, settings.output.trajectory_format)
    output = run_sweep(
        spec,
        parallelism=settings.sweep.parallel_workers,
        output=manager if settings.output.write_trajectories else None,
        plot_data=settings.output.plot_data,
    )
    _write_sweep_outputs(output, manager, settings)

    collided = sum(1 for record in output.records if record.collided)
    print(
        f"扫描完成: {len(output.records)} 次运行, {collided} 次碰撞, "
        f"{len(output.failures)} 次失败, 报告: {manager.output_dir / settings.output.report_name}"
    )
    for record in output.failures:
        logger.error(f"运行失败 {record.key.run_name}: {record.error}")
    return not output.failures


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数

    Returns:
        退出代码 (0: 成功, 1: 失败, 2: 参数错误)
    """
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    if not validate_arguments(args):
        return 1

    try:
        settings = apply_cli_overrides(args)
        if args.command == "run":
            success = run_single(args, settings)
        elif args.command == "sweep":
            success = run_grid(build_sweep_spec(args, settings), settings)
        else:
            success = run_grid(build_reproduce_spec(args, settings), settings)
        return 0 if success else 1

    except (ConfigError, ScenarioConfigError) as e:
        logger.error(f"配置无效: {e}")
        print(f"配置无效: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError, yaml.YAMLError) as e:
        logger.error(f"执行失败: {e}")
        print(f"执行失败: {e}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        logger.info("用户中断操作")
        return 1


if __name__ == "__main__":
    sys.exit(main())
