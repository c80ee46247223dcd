"""
文本报告生成模块

负责：
- 基线表（无攻击）
- 攻击对比表
- 碰撞状态矩阵与碰撞明细
- 风险分级与车队对比

输出为纯文本，相同扫描结果生成的报告字节级一致。
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from ..analysis.metrics import METRIC_NAMES, PhaseMetrics
from ..analysis.risk import RiskClass
from ..attacks.spec import AttackKind
from ..tasks.sweep import RunRecord, SweepOutput

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).parent / "templates"
REPORT_TEMPLATE = "report.txt.j2"
MISSING = "---"

METRIC_LABELS = {"v_avg": "V_avg", "mean_vsd": "VSD", "mean_ssd": "SSD", "thw": "THW"}
RISK_ORDER = (RiskClass.HIGH, RiskClass.VARIABLE, RiskClass.LOW)


def format_cell(value: Optional[float]) -> str:
    """数值保留两位小数，缺失值输出 ---"""
    if value is None:
        return MISSING
    return f"{value + 0.0:.2f}"


def metric_cells(metrics: Sequence[PhaseMetrics], phase_count: int) -> List[str]:
    """按 (指标, 阶段) 顺序展开单元格"""
    cells = []
    for metric in METRIC_NAMES:
        for index in range(phase_count):
            phase = metrics[index] if index < len(metrics) else None
            value = phase.value(metric) if phase is not None and phase.valid else None
            cells.append(format_cell(value))
    return cells


def _metric_rows(records: Sequence[RunRecord], phase_count: int) -> List[Dict[str, object]]:
    return [
        {
            "scenario": record.key.scenario,
            "fleet": record.key.fleet,
            "cells": metric_cells(record.metrics, phase_count) if record.success else ["ERR"] * (4 * phase_count),
        }
        for record in records
    ]


def _collision_matrix(output: SweepOutput) -> List[Dict[str, object]]:
    rows = []
    for records in output.by_attack().values():
        cells = []
        for scenario in output.spec.scenarios:
            scenario_records = [r for r in records if r.key.scenario == scenario]
            succeeded = [r for r in scenario_records if r.success]
            if not succeeded:
                cells.append("ERR")
            else:
                cells.append("Yes" if any(r.collided for r in succeeded) else "No")
        rows.append({"attack": records[0].key.attack, "cells": cells})
    return rows


def _collision_details(output: SweepOutput) -> List[Dict[str, object]]:
    return [
        {
            "attack": record.key.attack,
            "scenario": record.key.scenario,
            "fleet": record.key.fleet,
            "time": f"{record.collision.time:.3f}",
            "follower": record.collision.follower,
            "leader": record.collision.leader,
        }
        for record in output.records
        if record.success and record.collision is not None
    ]


def _risk_section(output: SweepOutput) -> Dict[str, object]:
    classes = output.risk_classes()
    tiers = [
        {"tier": tier.value, "kinds": [kind.value for kind, cls in classes.items() if cls is tier]}
        for tier in RISK_ORDER
    ]
    comparisons = []
    for kind in output.kinds():
        comparison = output.fleet_comparison(kind)
        risk = classes.get(kind)
        comparisons.append(
            {
                "kind": kind.value,
                "risk": risk.value if risk else MISSING,
                "higher_v_avg": comparison.higher_v_avg,
                "lower_vsd": comparison.lower_vsd,
                "lower_ssd": comparison.lower_ssd,
                "shorter_ttc": comparison.shorter_ttc,
                "recovery": " ".join(
                    f"{fleet}:{'Yes' if ok else 'No'}" for fleet, ok in comparison.recovery.items()
                ) or MISSING,
            }
        )
    unclassified = [kind.value for kind in output.kinds() if kind not in classes]
    return {"tiers": tiers, "comparisons": comparisons, "unclassified": unclassified}


def build_report_context(output: SweepOutput) -> Dict[str, object]:
    """把扫描结果整理为模板上下文"""
    phases = [phase.name for phase in output.spec.base.phases]
    groups = output.by_attack()
    baseline = [r for records in groups.values() for r in records if r.key.kind is AttackKind.NONE]
    attacks = [
        {"label": records[0].key.attack, "rows": _metric_rows(records, len(phases))}
        for records in groups.values()
        if records[0].key.kind is not AttackKind.NONE
    ]
    return {
        "phases": phases,
        "metrics": [METRIC_LABELS[m] for m in METRIC_NAMES],
        "scenarios": list(output.spec.scenarios),
        "fleets": sorted({r.key.fleet for r in output.records}, key=lambda f: (f != "EV", f)),
        "n_runs": len(output.records),
        "n_failed": len(output.failures),
        "baseline": _metric_rows(baseline, len(phases)),
        "attacks": attacks,
        "collision_matrix": _collision_matrix(output),
        "collisions": _collision_details(output),
        "risk": _risk_section(output),
        "failures": [
            {"name": r.key.run_name, "error": r.error} for r in output.records if not r.success
        ],
    }


def _environment() -> Environment:
    return Environment(
        loader=FileSystemLoader(str(TEMPLATE_DIR)),
        undefined=StrictUndefined,
        keep_trailing_newline=True,
        trim_blocks=True,
        lstrip_blocks=True,
        autoescape=False,
    )


def emit_report(output: SweepOutput) -> str:
    """
    渲染四段式文本报告

    Args:
        output: 扫描结果

    Returns:
        str: 报告文本，无效阶段的数值打印为 ---
    """
    text = _environment().get_template(REPORT_TEMPLATE).render(**build_report_context(output))
    logger.debug(f"报告已生成: {len(output.records)} 次运行")
    return text
