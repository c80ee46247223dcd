"""
风险分级与车队对比测试
"""

import pytest

from src.ringsim.analysis.metrics import PhaseMetrics
from src.ringsim.analysis.risk import (
    NOT_AVAILABLE,
    TIE,
    FleetOutcome,
    IncompleteOutcomeError,
    RiskClass,
    classify_risk,
    compare_fleets,
)


def valid(phase, v_avg, vsd, ssd):
    return PhaseMetrics(phase=phase, valid=True, v_avg=v_avg, mean_vsd=vsd, mean_ssd=ssd, thw=1.5)


class TestClassifyRisk:
    """三级风险分级测试"""

    def test_no_collisions_low(self):
        """测试全部场景无碰撞为 Low"""
        assert classify_risk({"I": False, "II": False, "III": False, "IV": False}) is RiskClass.LOW

    def test_all_collisions_high(self):
        """测试全部场景碰撞为 High"""
        assert classify_risk({"I": True, "II": True, "III": True, "IV": True}) is RiskClass.HIGH

    def test_mixed_variable(self):
        """测试部分场景碰撞为 Variable"""
        assert classify_risk({"I": False, "II": False, "III": False, "IV": True}) is RiskClass.VARIABLE

    def test_missing_scenario(self):
        """测试缺少场景结果时报错"""
        with pytest.raises(IncompleteOutcomeError, match="IV"):
            classify_risk({"I": False, "II": False, "III": False})

    def test_custom_scenario_set(self):
        """测试自定义场景集合"""
        assert classify_risk({"I": True}, scenarios=("I",)) is RiskClass.HIGH


class TestCompareFleets:
    """车队对比测试"""

    def test_comparison(self):
        """测试各项对比结论"""
        outcomes = [
            FleetOutcome("EV", (valid("pre", 10.0, 1.0, 2.0), valid("post", 12.0, 1.0, 2.0))),
            FleetOutcome(
                "ICE",
                (valid("pre", 8.0, 0.5, 2.0), PhaseMetrics(phase="post", valid=False)),
                collision_time=70.0,
            ),
        ]
        comparison = compare_fleets(outcomes)

        assert comparison.higher_v_avg == "EV"
        assert comparison.lower_vsd == "ICE"
        assert comparison.lower_ssd == TIE
        assert comparison.shorter_ttc == "ICE"
        assert comparison.recovery == {"EV": True, "ICE": False}

    def test_no_outcomes(self):
        """测试没有结果时输出 ---"""
        comparison = compare_fleets([])

        assert comparison.higher_v_avg == NOT_AVAILABLE
        assert comparison.shorter_ttc == NOT_AVAILABLE
        assert comparison.recovery == {}

    def test_shorter_ttc_by_mean(self):
        """测试碰撞时间取平均值比较"""
        outcomes = [
            FleetOutcome("EV", (), collision_time=65.0),
            FleetOutcome("EV", (), collision_time=85.0),
            FleetOutcome("ICE", (), collision_time=70.0),
        ]
        assert compare_fleets(outcomes).shorter_ttc == "ICE"
