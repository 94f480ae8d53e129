"""Herschel-Bulkley rheology and the consistency-dependent resistance."""

import math

import numpy as np
import pytest

from blowdown import rheology
from blowdown.errors import ParameterError, StateValidityError


class TestShearRate:
    def test_reference_flow(self):
        assert rheology.shear_rate(0.003, 0.2) == pytest.approx(
            3.8197186, abs=1e-6)

    def test_zero_flow(self):
        assert rheology.shear_rate(0.0, 0.2) == 0.0

    def test_linear_in_flow(self):
        assert rheology.shear_rate(0.006, 0.2) == pytest.approx(
            2.0 * rheology.shear_rate(0.003, 0.2), rel=1e-12)

    def test_rejects_negative_flow(self):
        with pytest.raises(StateValidityError):
            rheology.shear_rate(-1e-6, 0.2)

    def test_rejects_zero_diameter(self):
        with pytest.raises(ParameterError):
            rheology.shear_rate(0.003, 0.0)


class TestHBStress:
    def test_reference_point(self):
        gd = rheology.shear_rate(0.003, 0.2)
        tau = rheology.hb_stress(gd, 50.0, 75.0, 0.75)
        assert tau == pytest.approx(50.0 + 75.0 * gd ** 0.75, rel=1e-12)
        assert tau == pytest.approx(254.94, abs=0.05)

    def test_yield_stress_at_rest(self):
        assert rheology.hb_stress(0.0, 50.0, 75.0, 0.75) == 50.0

    def test_monotone_in_shear_rate(self):
        gds = np.linspace(0.0, 50.0, 200)
        taus = [rheology.hb_stress(g, 50.0, 75.0, 0.75) for g in gds]
        assert all(b >= a for a, b in zip(taus, taus[1:]))

    def test_rejects_negative_shear_rate(self):
        with pytest.raises(StateValidityError):
            rheology.hb_stress(-1.0, 50.0, 75.0, 0.75)


class TestHydraulicResistance:
    def test_reference_consistency(self):
        # At C = C_ref the resistance equals K_ref (up to the eps shift).
        assert rheology.hydraulic_resistance(
            0.10, 8000.0, 0.10, 2.0) == pytest.approx(8000.0, rel=1e-6)

    def test_initial_consistency(self):
        C_n = rheology.hydraulic_resistance(0.0909090909, 8000.0, 0.10, 2.0)
        assert C_n == pytest.approx(6611.57, abs=0.01)

    def test_quadratic_scaling(self):
        low = rheology.hydraulic_resistance(0.05, 8000.0, 0.10, 2.0)
        high = rheology.hydraulic_resistance(0.10, 8000.0, 0.10, 2.0)
        assert high == pytest.approx(4.0 * low, rel=1e-6)

    def test_monotone_in_consistency(self):
        Cs = np.linspace(0.0, 0.5, 100)
        vals = [rheology.hydraulic_resistance(C, 8000.0, 0.10, 2.0)
                for C in Cs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_rejects_consistency_outside_unit_interval(self):
        with pytest.raises(StateValidityError):
            rheology.hydraulic_resistance(1.5, 8000.0, 0.10, 2.0)

    def test_rejects_nonpositive_reference(self):
        with pytest.raises(ParameterError):
            rheology.hydraulic_resistance(0.1, 8000.0, 0.0, 2.0)


class TestViscousDissipation:
    def test_zero_at_rest(self):
        assert rheology.viscous_dissipation(255.0, 0.0) == 0.0

    def test_product_form(self):
        assert rheology.viscous_dissipation(255.5, 3.82) == pytest.approx(
            255.5 * 3.82, rel=1e-12)

    def test_rejects_nonfinite(self):
        with pytest.raises(StateValidityError):
            rheology.viscous_dissipation(math.nan, 1.0)
