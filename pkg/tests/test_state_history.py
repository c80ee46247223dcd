"""
车辆状态积分与状态历史单元测试
"""

import pytest

from src.ringsim.dynamics.history import HistoryLookupError, StateHistory, history_lookup
from src.ringsim.dynamics.idm import PRESETS, VehicleType, equilibrium_gap, idm_accel
from src.ringsim.dynamics.state import euler_step, gap_sum, predecessor


class TestRingTopology:
    """环形拓扑测试"""

    def test_predecessor(self):
        """测试前车编号"""
        assert predecessor(0, 10) == 9
        assert predecessor(5, 10) == 4

    def test_gap_sum(self, state_factory):
        """测试间距和恒等式"""
        states = state_factory([0.0] * 4, [10.0, 20.0, 5.0, 5.0])
        assert gap_sum(states, 5.0) == pytest.approx(60.0)


class TestEulerStep:
    """欧拉积分测试"""

    def test_uses_old_speeds(self, state_factory):
        """测试间距与位置使用 t 时刻速度"""
        states = state_factory([10.0, 12.0], [20.0, 15.0])
        updated = euler_step(states, [1.0, -1.0], 0.5, 1000.0)

        assert updated[0].position == pytest.approx(0.0 + 10.0 * 0.5)
        assert updated[0].speed == pytest.approx(10.5)
        assert updated[1].speed == pytest.approx(11.5)
        # 车辆 1 的前车为车辆 0
        assert updated[1].gap == pytest.approx(15.0 + (10.0 - 12.0) * 0.5)
        assert updated[0].gap == pytest.approx(20.0 + (12.0 - 10.0) * 0.5)
        assert updated[1].accel == -1.0

    def test_speed_clamped_at_zero(self, state_factory):
        """测试速度不为负"""
        states = state_factory([0.1, 0.1], [10.0, 10.0])
        updated = euler_step(states, [-10.0, -10.0], 0.5, 100.0)
        assert all(state.speed == 0.0 for state in updated)

    def test_position_wraps(self, state_factory):
        """测试位置对环长取模"""
        states = state_factory([10.0], [5.0])
        updated = euler_step(states, [0.0], 2.0, 15.0)
        assert updated[0].position == pytest.approx(5.0)

    def test_invalid_step(self, state_factory):
        """测试非法步长与加速度数量"""
        states = state_factory([1.0, 1.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            euler_step(states, [0.0, 0.0], 0.0, 10.0)
        with pytest.raises(ValueError):
            euler_step(states, [0.0], 0.1, 10.0)

    @pytest.mark.parametrize("vehicle_type", list(VehicleType))
    def test_equilibrium_persists(self, state_factory, vehicle_type):
        """测试均匀平衡流 1000 步后速度与间距保持不变"""
        p = PRESETS[vehicle_type]
        v = 12.0
        gap = equilibrium_gap(p, v)
        ring_length = 10 * (gap + 5.0)
        states = state_factory([v] * 10, [gap] * 10)

        for _ in range(1000):
            accels = [idm_accel(p, s.speed, s.gap, states[predecessor(s.id, 10)].speed - s.speed) for s in states]
            states = euler_step(states, accels, 1.0 / 30.0, ring_length)

        assert max(abs(s.speed - v) for s in states) < 1e-6
        assert max(abs(s.gap - gap) for s in states) < 1e-6


class TestStateHistory:
    """状态历史测试"""

    def test_lookup_nearest_tick(self, state_factory):
        """测试按最近 tick 查询"""
        history = StateHistory(dt=0.5)
        for tick in range(5):
            history.record(state_factory([float(tick)], [1.0]))

        assert history.current_tick == 4
        assert history.current_time == pytest.approx(2.0)
        assert history.lookup(1.0).tick == 2
        assert history.lookup(1.2).tick == 2
        assert history.lookup(1.3).tick == 3
        assert history_lookup(history, 0.0).speeds == (0.0,)

    def test_lookup_out_of_range(self, state_factory):
        """测试越界查询报错"""
        history = StateHistory(dt=0.5)
        history.record(state_factory([1.0], [1.0]))

        with pytest.raises(HistoryLookupError):
            history.lookup(-1.0)
        with pytest.raises(HistoryLookupError):
            history.lookup(0.6)

    def test_empty_history(self):
        """测试空历史"""
        with pytest.raises(HistoryLookupError):
            StateHistory(dt=0.1).lookup(0.0)
