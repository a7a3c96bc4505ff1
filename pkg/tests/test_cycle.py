import math

import numpy as np
import pytest

from qotto.cycle import (CycleConfig, apply_axis, build_config, classify_regime,
                         max_energy_deviation, stroke_entropy_production_trace,
                         strong_cycle, strong_cycle_via_oracle, weak_cycle)
from qotto.errors import ConfigError, UndefinedPowerError
from qotto.profiles import MarkovianProfile, NonMarkovianProfile

ENGINE = dict(omega_c=1.0, omega_h=2.0, beta_c=1.0, beta_h=0.2)
FRIDGE = dict(omega_c=1.0, omega_h=2.0, beta_c=1.0, beta_h=0.6)


def random_config(rng, kind=None):
    omega_c = rng.uniform(0.5, 2.0)
    omega_h = omega_c * rng.uniform(1.2, 3.0)
    beta_h = rng.uniform(0.05, 1.0)
    beta_c = beta_h * rng.uniform(1.2, 4.0)
    kind = kind or ("markovian" if rng.random() < 0.5 else "nonmarkovian")
    return build_config(omega_c, omega_h, beta_c, beta_h,
                        tau_h=rng.uniform(0.1, 5.0), tau_c=rng.uniform(0.1, 5.0),
                        kind_h=kind)


class TestWeakCycle:
    def test_engine_example(self):
        report = weak_cycle(build_config(**ENGINE, tau_h=2.0, tau_c=2.0))
        assert report.heat_hot == pytest.approx(0.76329039, abs=1e-8)
        assert report.heat_cold == pytest.approx(-0.38164519, abs=1e-8)
        assert report.work_total == pytest.approx(-0.38164519, abs=1e-8)
        assert report.eta == pytest.approx(0.5, abs=1e-12)
        assert report.regime == "engine"

    def test_refrigerator_example(self):
        report = weak_cycle(build_config(**FRIDGE, tau_h=2.0, tau_c=2.0))
        assert report.heat_cold == pytest.approx(0.07206045, abs=1e-8)
        assert report.work_total == pytest.approx(0.07206045, abs=1e-8)
        assert report.cop0 == pytest.approx(1.0, abs=1e-14)
        assert report.regime == "refrigerator"

    def test_degenerate_boundary(self):
        config = build_config(omega_c=1.0, omega_h=2.0, beta_c=1.0, beta_h=0.5,
                              tau_h=1.0, tau_c=1.0)
        report = weak_cycle(config)
        assert report.heat_hot == pytest.approx(0.0, abs=1e-14)
        assert report.heat_cold == pytest.approx(0.0, abs=1e-14)
        assert report.work_total == pytest.approx(0.0, abs=1e-14)
        assert report.regime == "other"

    def test_zero_duration_power_undefined(self):
        config = build_config(**ENGINE, tau_h=0.0, tau_c=0.0)
        with pytest.raises(UndefinedPowerError):
            weak_cycle(config)

    def test_first_law_identity(self):
        report = weak_cycle(build_config(**ENGINE, tau_h=1.0, tau_c=1.0))
        assert abs(report.work_total
                   + report.heat_hot + report.heat_cold) <= 1e-12

    def test_clausius_inequality_random_grid(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            config = random_config(rng)
            report = weak_cycle(config)
            clausius = (config.beta_h * report.heat_hot
                        + config.beta_c * report.heat_cold)
            assert clausius <= 1e-12


class TestConfigValidation:
    def test_all_problems_reported(self):
        config = CycleConfig(omega_c=-1.0, omega_h=-0.5, beta_c=0.1, beta_h=0.2,
                             tau_h=-1.0, tau_c=1.0)
        with pytest.raises(ConfigError) as err:
            config.validate()
        text = str(err.value)
        assert "omega_c" in text and "omega_h" in text
        assert "beta_c" in text and "tau_h" in text

    def test_profile_g_mismatch_detected(self):
        config = CycleConfig(**ENGINE, tau_h=1.0, tau_c=1.0,
                             profile_h=MarkovianProfile(g=0.5),
                             profile_c=MarkovianProfile(g=math.tanh(1.0)))
        with pytest.raises(ConfigError) as err:
            config.validate(need_profiles=True)
        assert "profile_h" in str(err.value)

    def test_build_config_rejects_unknown_kind(self):
        with pytest.raises(ConfigError):
            build_config(**ENGINE, tau_h=1.0, tau_c=1.0, kind_h="exotic")


class TestStrongCycle:
    def test_long_strokes_reduce_to_weak_cycle(self):
        tau = 60.0
        config = build_config(**ENGINE, tau_h=tau, tau_c=tau)
        strong = strong_cycle(config)
        weak = weak_cycle(config)
        assert strong.heat_hot == pytest.approx(weak.heat_hot, abs=1e-10)
        assert strong.heat_cold == pytest.approx(weak.heat_cold, abs=1e-10)
        assert strong.work_total == pytest.approx(weak.work_total, abs=1e-10)
        assert strong.power == pytest.approx(weak.power, abs=1e-12)
        assert strong.cyclicity_residual <= 1e-10

    def test_markovian_cop_closed_form(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            config = random_config(rng, kind="markovian")
            report = strong_cycle(config)
            expected = report.cop0 * (1.0 - math.exp(-config.tau_c / config.g_c))
            if report.work_total != 0.0:
                assert report.cop == pytest.approx(expected, abs=1e-8)

    def test_refrigerator_half_cop(self):
        g_c = math.tanh(1.0)
        config = build_config(**FRIDGE, tau_h=50.0, tau_c=g_c * math.log(2.0))
        report = strong_cycle(config)
        assert report.regime == "refrigerator"
        assert report.cop == pytest.approx(0.5, abs=1e-8)

    def test_engine_half_thermal_weight(self):
        g_h = math.tanh(0.4)
        config = build_config(**ENGINE, tau_h=g_h * math.log(2.0), tau_c=3.0)
        report = strong_cycle(config)
        assert report.thermal_weight_hot == pytest.approx(0.5, abs=1e-12)
        assert report.heat_hot == pytest.approx(0.38164519, abs=1e-8)
        assert report.eta == pytest.approx(0.5, abs=1e-12)

    def test_zero_duration_strokes_transfer_nothing(self):
        config = build_config(**ENGINE, tau_h=0.0, tau_c=0.0)
        report = strong_cycle(config)
        assert report.heat_hot == 0.0
        assert report.heat_cold == 0.0
        assert math.isnan(report.power)

    def test_scaling_identities_random(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            config = random_config(rng)
            report = strong_cycle(config)
            weak = weak_cycle(config)
            sw_h = report.thermal_weight_hot
            sw_c = report.thermal_weight_cold
            assert report.heat_hot == pytest.approx(weak.heat_hot * sw_h, abs=1e-8)
            assert report.heat_cold == pytest.approx(
                weak.heat_cold * sw_h * sw_c, abs=1e-8)
            assert report.work_total == pytest.approx(
                weak.work_total * sw_h, abs=1e-8)

    def test_efficiency_invariance(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            config = random_config(rng)
            report = strong_cycle(config)
            if report.heat_hot != 0.0:
                assert report.eta == pytest.approx(report.eta0, abs=1e-12)

    def test_cop_tracks_cold_thermal_weight(self):
        rng = np.random.default_rng(19)
        for _ in range(25):
            config = random_config(rng)
            report = strong_cycle(config)
            if report.work_total != 0.0:
                assert report.cop / report.cop0 == pytest.approx(
                    report.thermal_weight_cold, abs=1e-8)

    def test_boundary_works_vanish(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            report = strong_cycle(random_config(rng))
            for value in report.boundary_works().values():
                assert abs(value) <= 1e-12

    def test_first_law_per_stroke_and_cycle(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            report = strong_cycle(random_config(rng))
            for ledger in report.strokes.values():
                assert abs(ledger.first_law_residual) <= 1e-8
            first = report.strokes["quench_up"].internal_energy_initial
            last = report.strokes["disconnect_cold"].internal_energy_final
            assert report.energy_residual == pytest.approx(last - first, abs=1e-10)

    def test_perfect_thermalization_closes_cycle(self):
        config = build_config(**FRIDGE, tau_h=2.0, tau_c=80.0)
        report = strong_cycle(config)
        assert abs(report.work_total + report.heat_hot + report.heat_cold) <= 1e-8
        assert report.cyclicity_residual <= 1e-9

    def test_carnot_bounds_random_grid(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            report = strong_cycle(random_config(rng))
            if report.regime == "engine":
                assert report.eta <= report.carnot_eta + 1e-12
            elif report.regime == "refrigerator":
                assert report.cop <= report.carnot_cop + 1e-12

    def test_entropy_production_traces_nonnegative(self):
        for params in (ENGINE, FRIDGE):
            config = build_config(**params, tau_h=2.0, tau_c=2.0)
            for stroke in ("hot", "cold"):
                trace = stroke_entropy_production_trace(config, stroke, n_points=30)
                assert trace.min() >= -1e-8

    def test_nonmarkovian_power_advantage(self):
        markovian = MarkovianProfile(g=0.8)
        nonmarkovian = NonMarkovianProfile(g=0.8)
        ts = np.linspace(1e-3, 1.0, 1000)
        gaps = [nonmarkovian.thermal_weight(float(t)) - markovian.thermal_weight(float(t))
                for t in ts]
        assert max(gaps) > 0.0


class TestOraclePath:
    @pytest.mark.parametrize("kind", ["markovian", "nonmarkovian"])
    def test_matches_closed_form(self, kind):
        config = build_config(**ENGINE, tau_h=2.0, tau_c=2.0, kind_h=kind)
        closed = strong_cycle(config)
        oracle = strong_cycle_via_oracle(config)
        assert max_energy_deviation(closed, oracle) <= 1e-5

    def test_efficiency_via_oracle(self):
        config = build_config(**ENGINE, tau_h=1.3, tau_c=2.1)
        oracle = strong_cycle_via_oracle(config)
        assert oracle.eta == pytest.approx(oracle.eta0, abs=1e-8)

    def test_zero_duration_contacts(self):
        config = build_config(**ENGINE, tau_h=0.0, tau_c=0.0)
        report = strong_cycle_via_oracle(config)
        assert report.heat_hot == 0.0
        assert report.heat_cold == 0.0


class TestClassification:
    def test_sign_patterns(self):
        assert classify_regime(1.0, -0.5, -0.5) == "engine"
        assert classify_regime(-1.0, 0.5, 0.5) == "refrigerator"
        assert classify_regime(0.0, 0.0, 0.0) == "other"
        assert classify_regime(1.0, 0.5, -1.5) == "other"

    def test_ratio_rule_is_surfaced(self):
        report = weak_cycle(build_config(**ENGINE, tau_h=1.0, tau_c=1.0))
        assert report.ratio_rule_regime in ("engine", "refrigerator", "other")


class TestApplyAxis:
    def test_tau_axis(self):
        config = build_config(**ENGINE, tau_h=1.0, tau_c=1.0)
        assert apply_axis(config, "tau_c", 3.0).tau_c == 3.0

    def test_g_axis_rebuilds_beta_and_profile(self):
        config = build_config(**ENGINE, tau_h=1.0, tau_c=1.0)
        swept = apply_axis(config, "g_h", 0.5)
        assert swept.profile_h.g == pytest.approx(0.5, abs=1e-14)
        assert math.tanh(swept.beta_h * swept.omega_h) == pytest.approx(0.5, abs=1e-14)

    def test_omega_axis_rebuilds_profiles(self):
        config = build_config(**ENGINE, tau_h=1.0, tau_c=1.0)
        swept = apply_axis(config, "omega_h", 3.0)
        assert swept.profile_h.g == pytest.approx(math.tanh(0.2 * 3.0), abs=1e-14)

    def test_unknown_axis(self):
        config = build_config(**ENGINE, tau_h=1.0, tau_c=1.0)
        with pytest.raises(ConfigError):
            apply_axis(config, "volume", 1.0)
