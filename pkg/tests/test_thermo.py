import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brewflex.errors import DomainError
from brewflex.thermo import (
    FermentationHeatCoefficient,
    FermentationKinetics,
    TankThermalState,
    WortProperties,
    apparent_extract,
    apparent_extract_array,
    extract_rate,
    extract_rate_array,
    fermentation_heat,
    tank_dimensions,
    tank_step,
    wort_properties,
)

ALE = FermentationKinetics(p_initial=12.0, p_end=2.5, rate_b=0.05,
                           midpoint_m=60.0, shape_s=1.0)


def kinetics_strategy():
    return st.builds(
        FermentationKinetics,
        p_initial=st.floats(5.0, 25.0),
        p_end=st.floats(0.0, 5.0),
        rate_b=st.floats(0.005, 0.5),
        midpoint_m=st.floats(0.0, 400.0),
        shape_s=st.floats(0.2, 5.0),
    ).filter(lambda k: k.p_initial >= k.p_end)


class TestApparentExtract:
    def test_initial_value_close_to_pitch_gravity(self):
        # frozen closed-form value: 2.5 + 9.5 * (1 + e^-3)^-1
        assert apparent_extract(ALE, 0.0) == pytest.approx(11.549454204813117,
                                                           abs=1e-12)

    def test_midpoint_with_unit_shape(self):
        # at t = M with s = 1 the logistic sits exactly halfway
        assert apparent_extract(ALE, ALE.midpoint_m) == pytest.approx(7.25,
                                                                      abs=1e-12)

    def test_long_time_limit(self):
        assert apparent_extract(ALE, 5000.0) == pytest.approx(ALE.p_end,
                                                              abs=1e-9)

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            apparent_extract(ALE, -1.0)

    @given(k=kinetics_strategy(), t=st.floats(0.0, 2000.0))
    def test_bounded(self, k, t):
        p = apparent_extract(k, t)
        assert k.p_end - 1e-12 <= p <= k.p_initial + 1e-12

    @given(k=kinetics_strategy(),
           t1=st.floats(0.0, 2000.0), t2=st.floats(0.0, 2000.0))
    def test_monotone_non_increasing(self, k, t1, t2):
        lo, hi = sorted((t1, t2))
        assert apparent_extract(k, hi) <= apparent_extract(k, lo) + 1e-12

    def test_no_overflow_far_past_midpoint(self):
        fast = FermentationKinetics(p_initial=12.0, p_end=2.0, rate_b=0.5,
                                    midpoint_m=10.0, shape_s=0.5)
        p = apparent_extract(fast, 1e6)
        assert math.isfinite(p) and p == pytest.approx(2.0, abs=1e-9)

    def test_array_matches_scalar(self):
        t = np.linspace(0.0, 400.0, 101)
        vec = apparent_extract_array(ALE, t)
        scl = np.array([apparent_extract(ALE, float(x)) for x in t])
        np.testing.assert_allclose(vec, scl, rtol=0, atol=1e-13)


class TestExtractRate:
    def test_peak_at_midpoint_unit_shape(self):
        # -(A*B/s) * E * (1+E)^-2 with E = 1 gives -A*B/4
        assert extract_rate(ALE, 60.0) == pytest.approx(-0.11875, abs=1e-12)

    def test_zero_amplitude(self):
        flat = FermentationKinetics(p_initial=5.0, p_end=5.0, rate_b=0.1,
                                    midpoint_m=10.0, shape_s=1.0)
        assert extract_rate(flat, 3.0) == 0.0

    @given(k=kinetics_strategy(), t=st.floats(0.0, 2000.0))
    def test_never_positive(self, k, t):
        assert extract_rate(k, t) <= 0.0

    @settings(max_examples=200)
    @given(k=kinetics_strategy(), t=st.floats(1.0, 1000.0))
    def test_matches_finite_difference(self, k, t):
        h = 1e-4
        fd = (apparent_extract(k, t + h) - apparent_extract(k, t - h)) / (2 * h)
        assert extract_rate(k, t) == pytest.approx(fd, abs=1e-6)

    def test_array_matches_scalar(self):
        t = np.linspace(0.0, 400.0, 101)
        vec = extract_rate_array(ALE, t)
        scl = np.array([extract_rate(ALE, float(x)) for x in t])
        np.testing.assert_allclose(vec, scl, rtol=0, atol=1e-15)


class TestWortProperties:
    def test_reference_point(self):
        props = wort_properties(12.0, 19.0)
        assert props.density == pytest.approx(1045.33456, abs=1e-9)
        assert props.specific_heat == pytest.approx(3910.0, abs=1e-12)

    def test_water_limit(self):
        props = wort_properties(0.0, 4.0)
        assert props.density == pytest.approx(1000.0, abs=1e-9)
        assert props.specific_heat == pytest.approx(4186.0, abs=1e-12)

    def test_out_of_range_rejected(self):
        with pytest.raises(DomainError):
            wort_properties(40.0, 19.0)
        with pytest.raises(DomainError):
            wort_properties(12.0, 150.0)


class TestFermentationHeat:
    def test_reference_point(self):
        props = wort_properties(12.0, 19.0)
        q = fermentation_heat(props, 1.0, -0.1, FermentationHeatCoefficient())
        assert q == pytest.approx(170.44760742222222, abs=1e-9)

    def test_zero_rate_gives_zero(self):
        props = wort_properties(12.0, 19.0)
        assert fermentation_heat(props, 5.0, 0.0,
                                 FermentationHeatCoefficient()) == 0.0

    def test_positive_rate_rejected(self):
        props = wort_properties(12.0, 19.0)
        with pytest.raises(DomainError):
            fermentation_heat(props, 1.0, 0.5, FermentationHeatCoefficient())

    @given(v=st.floats(0.01, 500.0), rate=st.floats(-1.0, 0.0))
    def test_non_negative_and_linear_in_volume(self, v, rate):
        props = wort_properties(10.0, 15.0)
        e = FermentationHeatCoefficient()
        q1 = fermentation_heat(props, v, rate, e)
        q2 = fermentation_heat(props, 2.0 * v, rate, e)
        assert q1 >= 0.0
        assert q2 == pytest.approx(2.0 * q1, rel=1e-12)


class TestTankGeometry:
    def test_ten_cubic_meters(self):
        g = tank_dimensions(10.0)
        assert g.diameter == pytest.approx(1.8533610896304256, abs=1e-12)
        assert g.height == pytest.approx(2.0 * g.diameter, abs=1e-12)
        assert g.surface_area == pytest.approx(26.978013232149152, abs=1e-12)
        assert g.ua == pytest.approx(0.3 * g.surface_area, rel=1e-12)

    @given(v=st.floats(0.05, 1000.0))
    def test_volume_round_trip(self, v):
        g = tank_dimensions(v)
        assert math.pi / 4.0 * g.diameter**2 * g.height == pytest.approx(
            v, rel=1e-12
        )

    @given(v1=st.floats(0.05, 500.0), scale=st.floats(1.1, 8.0))
    def test_area_scales_sublinearly(self, v1, scale):
        a1 = tank_dimensions(v1).surface_area
        a2 = tank_dimensions(v1 * scale).surface_area
        assert a2 / a1 == pytest.approx(scale ** (2.0 / 3.0), rel=1e-9)

    def test_invalid_volume(self):
        with pytest.raises(DomainError):
            tank_dimensions(0.0)


class TestTankStep:
    def _state(self, temperature=15.0):
        return TankThermalState(temperature=temperature, extract=12.0,
                                fill_volume=5.0, time_since_pitch=0.0)

    def test_matches_analytic_constant_input(self):
        g = tank_dimensions(6.0)
        props = WortProperties(density=1040.0, specific_heat=4000.0)
        state = self._state(18.0)
        out = tank_step(state, g, q_ferm=800.0, q_cool=1500.0, ambient=25.0,
                        dt=3600.0, props=props)
        mcp = 1040.0 * 5.0 * 4000.0
        ua = g.ua
        t_eq = 25.0 + (800.0 - 1500.0) / ua
        expected = t_eq + (18.0 - t_eq) * math.exp(-ua / mcp * 3600.0)
        assert out.temperature == pytest.approx(expected, rel=1e-9)

    def test_substep_invariance(self):
        g = tank_dimensions(6.0)
        props = WortProperties(density=1040.0, specific_heat=4000.0)
        one = tank_step(self._state(), g, 500.0, 2000.0, 22.0, 3600.0, props)
        many = self._state()
        for _ in range(60):
            many = tank_step(many, g, 500.0, 2000.0, 22.0, 60.0, props)
        assert many.temperature == pytest.approx(one.temperature, rel=1e-9)
        assert many.time_since_pitch == pytest.approx(one.time_since_pitch,
                                                      rel=1e-9)

    def test_matches_dense_euler(self):
        g = tank_dimensions(6.0)
        props = WortProperties(density=1040.0, specific_heat=4000.0)
        out = tank_step(self._state(18.0), g, 800.0, 1500.0, 25.0, 3600.0,
                        props)
        mcp = 1040.0 * 5.0 * 4000.0
        temperature = 18.0
        n = 200_000
        dt = 3600.0 / n
        for _ in range(n):
            temperature += (800.0 - 1500.0 + g.ua * (25.0 - temperature)) \
                / mcp * dt
        assert out.temperature == pytest.approx(temperature, abs=1e-7)

    def test_perfectly_insulated_linear_form(self):
        g = tank_dimensions(6.0, u_value=0.0)
        props = WortProperties(density=1000.0, specific_heat=4000.0)
        out = tank_step(self._state(10.0), g, 0.0, 2000.0, 30.0, 3600.0, props)
        expected = 10.0 - 2000.0 * 3600.0 / (1000.0 * 5.0 * 4000.0)
        assert out.temperature == pytest.approx(expected, rel=1e-12)

    def test_advances_extract_with_kinetics(self):
        g = tank_dimensions(6.0)
        props = wort_properties(12.0, 19.0)
        out = tank_step(self._state(19.0), g, 0.0, 0.0, 19.0, 3600.0, props,
                        kinetics=ALE)
        assert out.time_since_pitch == pytest.approx(1.0)
        assert out.extract == pytest.approx(apparent_extract(ALE, 1.0),
                                            rel=1e-12)

    def test_rejects_bad_inputs(self):
        g = tank_dimensions(6.0)
        props = wort_properties(12.0, 19.0)
        with pytest.raises(DomainError):
            tank_step(self._state(), g, 0.0, -5.0, 20.0, 3600.0, props)
        with pytest.raises(DomainError):
            tank_step(self._state(), g, 0.0, 0.0, 20.0, 0.0, props)


class TestKineticsValidation:
    def test_inverted_gravity_rejected(self):
        with pytest.raises(DomainError):
            FermentationKinetics(p_initial=2.0, p_end=5.0, rate_b=0.1,
                                 midpoint_m=10.0, shape_s=1.0)

    def test_non_positive_rate_rejected(self):
        with pytest.raises(DomainError):
            FermentationKinetics(p_initial=12.0, p_end=2.0, rate_b=0.0,
                                 midpoint_m=10.0, shape_s=1.0)
