"""
实验扫描与文本报告测试
"""

from dataclasses import replace

import pytest

from src.ringsim.analysis.metrics import PhaseMetrics
from src.ringsim.analysis.risk import RiskClass
from src.ringsim.attacks.spec import AttackKind, AttackSpec, NO_ATTACK
from src.ringsim.dynamics.state import Powertrain
from src.ringsim.file_manager import OutputManager
from src.ringsim.reporting.report import emit_report, format_cell, metric_cells
from src.ringsim.scenarios.definitions import SCENARIO_ORDER, ScenarioConfigError
from src.ringsim.scenarios.engine import Collision
from src.ringsim.tasks.sweep import (
    RunKey,
    RunRecord,
    SweepOutput,
    SweepSpec,
    reproduction_attacks,
    reproduction_spec,
    run_sweep,
    select_attacks,
)

DPDA_SHORT = AttackSpec(kind=AttackKind.DPDA, window=(4.0, 6.0), delay_m=2.0)


@pytest.fixture
def small_spec(short_config):
    """场景 I / IV × EV / ICE × (baseline, DPDA)，10 秒仿真"""
    return SweepSpec(
        scenarios=("I", "IV"),
        fleets=(Powertrain.EV, Powertrain.ICE),
        attacks=(NO_ATTACK, DPDA_SHORT),
        base=short_config,
    )


def synthetic_output() -> SweepOutput:
    """BA 四个场景全碰撞、PA 均无碰撞、DPDA 仅场景 IV 碰撞"""
    attacks = (
        AttackSpec(kind=AttackKind.BA, blinded_p=2),
        AttackSpec(kind=AttackKind.PA),
        AttackSpec(kind=AttackKind.DPDA, delay_m=6.0),
    )
    spec = SweepSpec(scenarios=SCENARIO_ORDER, fleets=(Powertrain.EV,), attacks=attacks)
    intact = (
        PhaseMetrics("pre", True, 15.0, 0.5, 1.0, 1.6),
        PhaseMetrics("during", True, 14.0, 1.5, 2.0, 1.7),
        PhaseMetrics("post", True, 15.0, 0.6, 1.1, 1.6),
    )
    crashed = (
        PhaseMetrics("pre", True, 15.0, 0.5, 1.0, 1.6),
        PhaseMetrics("during", False),
        PhaseMetrics("post", False),
    )
    records = []
    for index, attack in enumerate(attacks):
        for scenario in SCENARIO_ORDER:
            key = RunKey(
                attack_index=index,
                attack=attack.label,
                kind=attack.kind,
                scenario=scenario,
                fleet="EV",
                slug=attack.slug,
            )
            collides = attack.kind is AttackKind.BA or (attack.kind is AttackKind.DPDA and scenario == "IV")
            if collides:
                collision = Collision(time=75.0, follower=1, leader=0, tick=2250)
                records.append(RunRecord(key=key, metrics=crashed, collision=collision, n_ticks=2251))
            else:
                records.append(RunRecord(key=key, metrics=intact, n_ticks=3601))
    return SweepOutput(spec=spec, records=tuple(records))


class TestSweepSpec:
    """扫描配置测试"""

    def test_run_configs_order(self, small_spec):
        """测试运行集合按 (攻击, 场景, 车队) 排序"""
        runs = small_spec.run_configs()
        names = [key.run_name for key, _ in runs]

        assert len(runs) == 8
        assert names[0] == "00_baseline_I_EV"
        assert names[1] == "00_baseline_I_ICE"
        assert names[-1] == "01_DPDA_m2_IV_ICE"
        assert runs[-1][1].attack.targets == {1, 5, 6}
        assert runs[-1][1].fleet_powertrain is Powertrain.ICE

    def test_empty_axis_rejected(self):
        """测试空轴报错"""
        with pytest.raises(ScenarioConfigError, match="sweep.fleets"):
            SweepSpec(fleets=()).validate()

    def test_reproduction_grid(self):
        """测试复现网格：4 个场景 × 2 种车队 × 9 组攻击"""
        attacks = reproduction_attacks()
        spec = reproduction_spec()

        assert len(attacks) == 9
        assert [a.delay_m for a in attacks if a.kind is AttackKind.DPDA] == [6.0, 8.0, 9.0]
        assert len(spec.run_configs()) == 72

    def test_select_attacks_keeps_baseline(self):
        """测试筛选攻击类型时保留 baseline"""
        spec = select_attacks(reproduction_spec(), [AttackKind.BA])
        assert [a.kind for a in spec.attacks] == [AttackKind.NONE, AttackKind.BA]


class TestRunSweep:
    """扫描执行测试"""

    def test_records_complete(self, small_spec):
        """测试每个运行都有记录且阶段指标有效"""
        output = run_sweep(small_spec, parallelism=2)

        assert len(output.records) == 8
        assert not output.failures
        assert output.stats["runs"] == 8
        for record in output.records:
            assert record.n_ticks == 301
            assert [m.phase for m in record.metrics] == ["pre", "during", "post"]

    def test_independent_of_parallelism(self, small_spec, tmp_path):
        """测试报告与轨迹文件不受并行度影响"""
        serial = run_sweep(small_spec, parallelism=1, output=OutputManager(tmp_path / "serial"))
        parallel = run_sweep(small_spec, parallelism=4, output=OutputManager(tmp_path / "parallel"))

        assert [r.key for r in serial.records] == [r.key for r in parallel.records]
        assert emit_report(serial) == emit_report(parallel)
        for record in serial.records:
            name = f"{record.key.run_name}.csv"
            first = (tmp_path / "serial" / "trajectories" / name).read_bytes()
            second = (tmp_path / "parallel" / "trajectories" / name).read_bytes()
            assert first == second

    def test_failed_run_isolated(self, small_spec):
        """测试单次运行失败不影响其余运行"""
        too_early = AttackSpec(kind=AttackKind.DPDA, window=(2.0, 4.0), delay_m=5.0)
        spec = replace(small_spec, attacks=(NO_ATTACK, too_early))
        output = run_sweep(spec, parallelism=2)

        assert len(output.records) == 8
        assert len(output.failures) == 4
        assert all(r.key.kind is AttackKind.DPDA for r in output.failures)
        assert "HistoryLookupError" in output.failures[0].error
        assert output.stats["failures"] == 4

        report = emit_report(output)
        assert "== Failed runs ==" in report
        assert "01_DPDA_m5_I_EV: HistoryLookupError" in report
        assert f"{'DPDA(m=5)':<22}{'ERR':>6}{'ERR':>6}" in report

    def test_invalid_parallelism(self, small_spec):
        """测试并行度必须为正"""
        with pytest.raises(ValueError, match="parallelism"):
            run_sweep(small_spec, parallelism=0)


class TestSweepOutput:
    """扫描结果汇总测试"""

    def test_risk_classes(self):
        """测试按碰撞场景分级"""
        classes = synthetic_output().risk_classes()

        assert classes[AttackKind.BA] is RiskClass.HIGH
        assert classes[AttackKind.PA] is RiskClass.LOW
        assert classes[AttackKind.DPDA] is RiskClass.VARIABLE

    def test_incomplete_scenarios_unclassified(self, small_spec):
        """测试未覆盖四个场景的攻击不参与分级"""
        output = run_sweep(small_spec, parallelism=2)
        assert output.risk_classes() == {}
        assert "Unclassified (scenarios missing): DPDA" in emit_report(output)

    def test_collision_outcomes(self):
        """测试碰撞结果按场景汇总"""
        outcomes = synthetic_output().collision_outcomes(AttackKind.DPDA)
        assert outcomes == {"I": False, "II": False, "III": False, "IV": True}


class TestReport:
    """文本报告测试"""

    def test_cell_format(self):
        """测试单元格两位小数与缺失值"""
        assert format_cell(15.738) == "15.74"
        assert format_cell(-0.0) == "0.00"
        assert format_cell(None) == "---"

    def test_metric_cells_order(self):
        """测试单元格按 (指标, 阶段) 展开"""
        metrics = (PhaseMetrics("pre", True, 1.0, 2.0, 3.0, None), PhaseMetrics("post", False))
        assert metric_cells(metrics, 2) == ["1.00", "---", "2.00", "---", "3.00", "---", "---", "---"]

    def test_sections(self):
        """测试四个报告段落及其内容"""
        report = emit_report(synthetic_output())

        assert report.startswith("RINGSIM EXPERIMENT REPORT\n")
        for heading in (
            "== 1. Baseline performance (no attack) ==",
            "== 2. Attack comparison ==",
            "== 3. Collision status ==",
            "== 4. Risk classification ==",
        ):
            assert heading in report
        assert "(no baseline runs)" in report
        assert "== Failed runs ==" not in report

    def test_truncated_phases_print_dashes(self):
        """测试碰撞后的阶段打印 ---"""
        report = emit_report(synthetic_output())
        assert "I     EV     |  15.00    ---    --- |   0.50    ---    ---" in report

    def test_collision_matrix(self):
        """测试碰撞矩阵与碰撞明细"""
        report = emit_report(synthetic_output())

        assert f"{'BA(p=2,phi=50)':<22}" + "   Yes" * 4 in report
        assert f"{'PA':<22}" + "    No" * 4 in report
        assert f"{'DPDA(m=6)':<22}" + "    No" * 3 + "   Yes" in report
        assert "t=   75.000s  vehicle 1 -> 0" in report

    def test_risk_tiers(self):
        """测试风险分级行"""
        report = emit_report(synthetic_output())

        assert "High:     BA\n" in report
        assert "Variable: DPDA\n" in report
        assert "Low:      PA\n" in report

    def test_fleet_comparison_single_fleet(self):
        """测试只有一种车队时指标对比取该车队，无碰撞时 TTC 为 ---"""
        report = emit_report(synthetic_output())
        assert "PA       Low       EV            EV         EV         ---          EV:Yes" in report

    def test_byte_stable(self):
        """测试相同结果生成相同报告"""
        assert emit_report(synthetic_output()) == emit_report(synthetic_output())
