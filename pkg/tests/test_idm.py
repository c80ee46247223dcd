"""
IDM 跟驰模型单元测试
"""

import pytest

from src.ringsim.dynamics.idm import (
    DEFAULT_BOUNDS,
    PRESETS,
    AccelBounds,
    GapContractError,
    IdmParams,
    VehicleType,
    desired_spacing,
    equilibrium_gap,
    idm_accel,
)


class TestIdmParams:
    """参数向量测试"""

    def test_presets_cover_all_types(self):
        """测试三类车辆均有预设"""
        assert set(PRESETS) == set(VehicleType)
        assert PRESETS[VehicleType.EV_ACC].alpha == pytest.approx(2.01)
        assert PRESETS[VehicleType.ICE_ACC].kappa == pytest.approx(15.50)
        assert PRESETS[VehicleType.HDV].v_d == pytest.approx(30.0)

    def test_non_positive_parameter_rejected(self):
        """测试非正参数被拒绝"""
        with pytest.raises(ValueError, match="alpha"):
            IdmParams(alpha=0.0, beta=1.0, kappa=4.0, eta=2.0, tau=1.0, v_d=30.0)

    def test_with_overrides(self):
        """测试部分字段覆盖"""
        base = PRESETS[VehicleType.EV_ACC]
        updated = base.with_overrides(eta=3.0)

        assert updated.eta == 3.0
        assert updated.tau == base.tau
        assert base.eta == pytest.approx(2.02)

    def test_dict_round_trip(self):
        """测试字典转换"""
        params = PRESETS[VehicleType.HDV]
        assert IdmParams.from_dict(params.to_dict()) == params


class TestAccelBounds:
    """加速度边界测试"""

    def test_invalid_bounds(self):
        """测试 ξ < 0 < ρ 约束"""
        with pytest.raises(ValueError):
            AccelBounds(xi=1.0, rho=5.0)

    def test_clamp(self):
        """测试截断"""
        assert DEFAULT_BOUNDS.clamp(-50.0) == -10.0
        assert DEFAULT_BOUNDS.clamp(12.0) == 5.0
        assert DEFAULT_BOUNDS.clamp(1.5) == 1.5


class TestIdmAccel:
    """加速度函数测试"""

    def test_from_rest(self):
        """测试静止起步：α[1 - (η/s)²]"""
        p = PRESETS[VehicleType.HDV]
        accel = idm_accel(p, 0.0, 5.0, 0.0)
        assert accel == pytest.approx(1.06 * (1.0 - (3.4 / 5.0) ** 2))

    def test_desired_spacing(self):
        """测试期望间距公式"""
        p = PRESETS[VehicleType.EV_ACC]
        expected = p.eta + p.tau * 10.0 + 10.0 * -2.0 / (2.0 * (p.alpha * p.beta) ** 0.5)
        assert desired_spacing(p, 10.0, -2.0) == pytest.approx(expected)

    def test_closing_rate_in_desired_spacing(self):
        """测试接近前车（dv < 0）时期望间距按接近速率增大"""
        p = PRESETS[VehicleType.HDV]
        s_hat = p.eta + p.tau * 10.0 + 10.0 * 2.0 / (2.0 * (p.alpha * p.beta) ** 0.5)
        expected = p.alpha * (1.0 - (10.0 / p.v_d) ** p.kappa - (s_hat / 20.0) ** 2)

        assert idm_accel(p, 10.0, 20.0, -2.0) == pytest.approx(expected)
        assert expected < 0

    def test_closing_brakes_harder_than_opening(self):
        """测试同一间距下接近前车比远离前车减速更强"""
        for vehicle_type in VehicleType:
            p = PRESETS[vehicle_type]
            closing = idm_accel(p, 12.0, 8.0, -3.0)
            steady = idm_accel(p, 12.0, 8.0, 0.0)
            opening = idm_accel(p, 12.0, 8.0, 3.0)
            assert closing <= steady <= opening
            assert closing < opening

    def test_non_positive_gap_raises(self):
        """测试间距非正时报错"""
        with pytest.raises(GapContractError):
            idm_accel(PRESETS[VehicleType.HDV], 5.0, 0.0, 0.0)

    def test_tiny_gap_clamped_to_min(self):
        """测试极小间距时截断到 ξ"""
        assert idm_accel(PRESETS[VehicleType.HDV], 20.0, 0.01, -5.0) == -10.0

    def test_custom_bounds(self):
        """测试自定义上界"""
        bounds = AccelBounds(xi=-3.0, rho=0.5)
        assert idm_accel(PRESETS[VehicleType.EV_ACC], 0.0, 100.0, 0.0, bounds) == 0.5

    def test_equilibrium_gap(self):
        """测试平衡间距处加速度为零"""
        for vehicle_type, v in ((VehicleType.HDV, 10.0), (VehicleType.EV_ACC, 15.0), (VehicleType.ICE_ACC, 20.0)):
            p = PRESETS[vehicle_type]
            gap = equilibrium_gap(p, v)
            assert idm_accel(p, v, gap, 0.0) == pytest.approx(0.0, abs=1e-9)

    def test_equilibrium_gap_out_of_range(self):
        """测试平衡速度不小于期望速度时报错"""
        p = PRESETS[VehicleType.HDV]
        with pytest.raises(ValueError):
            equilibrium_gap(p, p.v_d)
