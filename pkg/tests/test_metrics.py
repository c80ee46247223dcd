"""
阶段稳定性指标测试
"""

import numpy as np
import pytest

from src.ringsim.analysis.metrics import (
    PhaseMetrics,
    compute_phase,
    mean_ssd,
    mean_vsd,
    phase_is_valid,
    phase_metrics,
    ssd_per_vehicle,
    thw,
    v_avg,
    vsd_per_vehicle,
)
from src.ringsim.scenarios.definitions import Phase, SimConfig, get_scenario
from src.ringsim.scenarios.engine import Collision, RunResult, Trajectory, run


def make_trajectory(speeds, gaps) -> Trajectory:
    speeds = np.asarray(speeds, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    times = np.arange(speeds.shape[0], dtype=float)
    return Trajectory(
        times=times,
        positions=np.zeros_like(speeds),
        speeds=speeds,
        gaps=gaps,
        accels=np.zeros_like(speeds),
    )


WINDOW = Phase("w", 0.0, 2.0)


class TestStandardDeviation:
    """VSD / SSD 测试"""

    def test_constant_series(self):
        """测试常数序列标准差为 0"""
        trajectory = make_trajectory([[5.0, 7.0]] * 4, [[20.0, 30.0]] * 4)

        assert vsd_per_vehicle(trajectory, 0, WINDOW) == 0.0
        assert ssd_per_vehicle(trajectory, 1, WINDOW) == 0.0
        assert mean_vsd(trajectory, WINDOW) == 0.0

    def test_population_sd(self):
        """测试两点序列 {1, 3} 的总体标准差为 1"""
        trajectory = make_trajectory([[1.0, 15.0], [3.0, 15.0], [9.0, 15.0]], [[1.0, 2.0], [3.0, 2.0], [0.0, 2.0]])

        assert vsd_per_vehicle(trajectory, 0, WINDOW) == pytest.approx(1.0)
        assert mean_vsd(trajectory, WINDOW) == pytest.approx(0.5)
        assert mean_ssd(trajectory, WINDOW) == pytest.approx(0.5)

    def test_closed_window_includes_end(self):
        """测试闭合窗口包含结束时刻"""
        trajectory = make_trajectory([[1.0], [3.0], [5.0]], [[1.0], [1.0], [1.0]])
        closed = Phase("w", 0.0, 2.0, closed=True)

        assert v_avg(trajectory, closed) == pytest.approx(3.0)
        assert v_avg(trajectory, WINDOW) == pytest.approx(2.0)

    def test_empty_window(self):
        """测试窗口内无采样点时报错"""
        trajectory = make_trajectory([[1.0]], [[1.0]])
        with pytest.raises(ValueError, match="没有采样点"):
            v_avg(trajectory, Phase("late", 5.0, 6.0))


class TestThw:
    """车头时距测试"""

    def test_constant_flow(self):
        """测试 v=15、gap=24 的匀速流 THW = 1.6 s"""
        trajectory = make_trajectory([[15.0, 15.0]] * 3, [[24.0, 24.0]] * 3)
        assert thw(trajectory, WINDOW) == pytest.approx(1.6)

    def test_slow_samples_excluded(self):
        """测试低速样本被排除"""
        trajectory = make_trajectory([[10.0, 0.05], [10.0, 0.0]], [[20.0, 5.0], [30.0, 5.0]])
        assert thw(trajectory, WINDOW) == pytest.approx(2.5)

    def test_all_stopped(self):
        """测试全部静止时 THW 无定义"""
        trajectory = make_trajectory([[0.0, 0.0]] * 2, [[5.0, 5.0]] * 2)
        assert thw(trajectory, WINDOW) is None


class TestPhaseValidity:
    """阶段有效性测试"""

    def _result(self, collision_time):
        config = SimConfig(scenario=get_scenario("I"))
        trajectory = make_trajectory([[1.0]], [[1.0]])
        collision = None
        if collision_time is not None:
            collision = Collision(time=collision_time, follower=1, leader=0, tick=0)
        return RunResult(config=config, trajectory=trajectory, collision=collision)

    def test_no_collision_all_valid(self):
        """测试无碰撞时全部有效"""
        result = self._result(None)
        assert all(phase_is_valid(result, phase) for phase in result.config.phases)

    def test_collision_during_attack(self):
        """测试攻击期间碰撞使 during 与 post 失效"""
        result = self._result(75.0)
        pre, during, post = result.config.phases

        assert phase_is_valid(result, pre)
        assert not phase_is_valid(result, during)
        assert not phase_is_valid(result, post)

    def test_boundary_times(self):
        """测试碰撞恰在阶段结束时刻"""
        pre, _, post = SimConfig(scenario=get_scenario("I")).phases

        assert phase_is_valid(self._result(60.0), pre)
        assert not phase_is_valid(self._result(120.0), post)

    def test_invalid_phase_has_no_values(self):
        """测试失效阶段数值缺失"""
        result = self._result(75.0)
        metrics = compute_phase(result, result.config.phases[1])

        assert metrics == PhaseMetrics(phase="during", valid=False)
        assert metrics.value("v_avg") is None


class TestPhaseMetrics:
    """整次仿真的阶段指标"""

    def test_baseline_run(self, short_config):
        """测试无攻击仿真三个阶段均有效且数值非负"""
        metrics = phase_metrics(run(short_config))

        assert [m.phase for m in metrics] == ["pre", "during", "post"]
        for m in metrics:
            assert m.valid
            assert m.v_avg > 0
            assert m.mean_vsd >= 0
            assert m.mean_ssd >= 0
            assert m.thw is not None and m.thw > 0

    def test_collided_run(self, crash_config):
        """测试碰撞后的阶段标记为失效"""
        result = run(crash_config)
        metrics = phase_metrics(result)

        for phase, m in zip(crash_config.phases, metrics):
            assert m.valid == phase_is_valid(result, phase)
        assert not metrics[-1].valid
        assert metrics[-1].to_dict()["v_avg"] is None
