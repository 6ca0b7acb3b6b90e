import numpy as np
import pytest

from brewflex import kernels
from brewflex.flexibility import FlexBand, simulate_dispatch, thermostat_step


def relay_reference(t0, on0, q_ferm, ambient, mcp, ua, q_max, setpoint,
                    hysteresis):
    """Pure-python relay simulation used as the kernel oracle."""
    band = FlexBand(setpoint=setpoint, deadband_delta=max(hysteresis, 1.0),
                    hysteresis=hysteresis)
    duty = []
    temp = t0
    on = on0
    temps = [temp]
    for k in range(len(q_ferm)):
        on = bool(thermostat_step(temp, band, on))
        duty.append(1.0 if on else 0.0)
        temp = simulate_dispatch(
            [duty[-1]], temp, [q_ferm[k]], [ambient[k]], mcp, ua, q_max
        )[1]
        temps.append(temp)
    return np.array(duty), np.array(temps), on


class TestRelayWindow:
    def test_matches_python_relay(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n = int(rng.integers(1, 48))
            t0 = float(rng.uniform(17.0, 21.0))
            q = rng.uniform(0, 3000, n)
            amb = rng.uniform(-5, 30, n)
            mcp = float(rng.uniform(1e6, 1e7))
            ua = float(rng.choice([0.0, rng.uniform(0.1, 30.0)]))
            q_max = float(rng.uniform(2000, 8000))
            duty = np.zeros(n)
            temps = np.zeros(n + 1)
            on_end = kernels.relay_window(t0, False, q, amb, mcp, ua, q_max,
                                          19.0, 0.5, 3600.0, duty, temps)
            ref_duty, ref_temps, ref_on = relay_reference(
                t0, False, q, amb, mcp, ua, q_max, 19.0, 0.5
            )
            np.testing.assert_array_equal(duty, ref_duty)
            np.testing.assert_allclose(temps, ref_temps, rtol=1e-12)
            assert bool(on_end) == ref_on

    def test_relay_keeps_band_when_capacity_sufficient(self):
        # the relay acts hourly, so excursions beyond the hysteresis are
        # bounded by one hour's worth of heating or cooling
        n = 400
        mcp = 4e6
        q = np.full(n, 1200.0)
        q_max = 5000.0
        duty = np.zeros(n)
        temps = np.zeros(n + 1)
        kernels.relay_window(19.0, False, q, np.full(n, 19.0), mcp, 0.0,
                             q_max, 19.0, 0.5, 3600.0, duty, temps)
        heat_swing = 1200.0 * 3600.0 / mcp
        cool_swing = (q_max - 1200.0) * 3600.0 / mcp
        assert np.all(temps <= 19.0 + 0.5 + heat_swing + 1e-9)
        assert np.all(temps >= 19.0 - 0.5 - cool_swing - 1e-9)


class TestRedispatch:
    def _window(self, prices, seed=0, ua=0.0, flexible=True):
        rng = np.random.default_rng(seed)
        n = len(prices)
        q = rng.uniform(500, 2500, n)
        amb = rng.uniform(0, 25, n)
        mcp = 5e6
        q_max = 4000.0
        duty = np.zeros(n)
        temps = np.zeros(n + 1)
        kernels.policy_window(19.0, False, q, amb, np.asarray(prices, float),
                              mcp, ua, q_max, 19.0, 0.5, 1.0, 3600.0,
                              1 if flexible else 0, float(np.max(prices)),
                              duty, temps)
        return q, amb, mcp, q_max, duty, temps

    def test_energy_conserved_vs_baseline(self):
        prices = np.r_[np.full(12, 200.0), np.full(12, 800.0)]
        q, amb, mcp, q_max, flex_duty, _ = self._window(prices)
        _, _, _, _, base_duty, _ = self._window(prices, flexible=False)
        assert np.sum(flex_duty) == pytest.approx(np.sum(base_duty), abs=1e-9)

    def test_moves_cost_down(self):
        prices = np.r_[np.full(12, 200.0), np.full(12, 800.0)]
        q, amb, mcp, q_max, flex_duty, _ = self._window(prices)
        _, _, _, _, base_duty, _ = self._window(prices, flexible=False)
        assert float(flex_duty @ prices) <= float(base_duty @ prices) + 1e-9

    def test_duty_stays_in_unit_interval(self):
        rng = np.random.default_rng(8)
        for seed in range(10):
            prices = rng.uniform(-50, 900, 24)
            _, _, _, _, duty, _ = self._window(prices, seed=seed)
            assert np.all(duty >= -1e-12) and np.all(duty <= 1.0 + 1e-12)

    def test_constant_prices_identical_to_baseline(self):
        prices = np.full(24, 400.0)
        for seed in range(5):
            _, _, _, _, flex_duty, flex_temps = self._window(prices, seed=seed)
            _, _, _, _, base_duty, base_temps = self._window(
                prices, seed=seed, flexible=False
            )
            np.testing.assert_array_equal(flex_duty, base_duty)
            np.testing.assert_array_equal(flex_temps, base_temps)

    def test_temps_match_exact_resimulation(self):
        prices = np.r_[np.full(12, 100.0), np.full(12, 900.0)]
        q, amb, mcp, q_max, duty, temps = self._window(prices, ua=8.0)
        ref = simulate_dispatch(duty, 19.0, q, amb, mcp, 8.0, q_max)
        np.testing.assert_allclose(temps, ref, rtol=1e-12)

    def test_lossy_tank_never_costs_more(self):
        rng = np.random.default_rng(17)
        for seed in range(20):
            prices = rng.uniform(50, 900, 24)
            q, amb, mcp, q_max, flex_duty, _ = self._window(
                prices, seed=seed, ua=12.0
            )
            _, _, _, _, base_duty, _ = self._window(
                prices, seed=seed, ua=12.0, flexible=False
            )
            assert float(flex_duty @ prices) <= float(base_duty @ prices) + 1e-9


class TestSimulateSegment:
    def test_window_chaining_matches_single_simulation(self):
        rng = np.random.default_rng(5)
        n = 72
        q = rng.uniform(500, 2500, n)
        amb = rng.uniform(0, 25, n)
        prices = rng.uniform(100, 800, n)
        sp = np.full(n, 19.0)
        mcp = np.full(n, 5e6)
        for splits in ([0, n], [0, 24, 48, n], [0, 10, 30, 31, n]):
            starts = np.array(splits[:-1])
            ends = np.array(splits[1:])
            duty = np.zeros(n)
            temps = np.zeros(n + 1)
            end = kernels.simulate_segment(
                starts, ends, q, amb, prices, sp, mcp, 0.0, 4000.0,
                0.5, 1.0, 3600.0, 0, 900.0, 19.0, duty, temps
            )
            ref = simulate_dispatch(duty, 19.0, q, amb, 5e6, 0.0, 4000.0)
            np.testing.assert_allclose(temps, ref, rtol=1e-12)
            assert end == pytest.approx(ref[-1], rel=1e-12)
