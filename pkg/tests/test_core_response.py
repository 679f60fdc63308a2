import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringecho import (
    FrequencyGrid,
    JunctionCoupling,
    RingGeometry,
    density_of_states_profile,
    fsr_integral,
    g_ab,
    g_ba,
    g_ca,
)


def geometric_gca(omega, rho, tau, T, n_terms=200):
    """Independent oracle: truncated geometric echo sum for the cavity response."""
    total = 0.0 + 0.0j
    for n in range(n_terms + 1):
        total += rho**n * np.exp(1j * n * omega * T)
    return tau * total


class TestJunctionCoupling:
    def test_normalizes_tau(self):
        j = JunctionCoupling(0.75)
        assert abs(j.tau**2 + j.rho**2 - 1.0) < 1e-12

    def test_from_tau(self):
        j = JunctionCoupling.from_tau(0.6)
        assert abs(j.rho - 0.8) < 1e-12

    @pytest.mark.parametrize("rho", [-0.1, 1.0, 1.5])
    def test_rejects_bad_rho(self, rho):
        with pytest.raises(ValueError):
            JunctionCoupling(rho)

    def test_rejects_zero_tau(self):
        with pytest.raises(ValueError):
            JunctionCoupling.from_tau(0.0)


class TestRingGeometry:
    def test_derived_quantities(self):
        geom = RingGeometry(length=3.0, group_velocity=1.5)
        assert geom.round_trip == 2.0
        assert abs(geom.fsr - math.pi) < 1e-15

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            RingGeometry(0.0, 1.0)
        with pytest.raises(ValueError):
            RingGeometry(1.0, -1.0)


class TestGca:
    def test_no_cavity_is_pure_transmission(self):
        j = JunctionCoupling(0.0)
        for w in (-3.7, 0.0, 12.0):
            assert g_ca(w, j, 1.0) == pytest.approx(1.0 + 0.0j)

    def test_resonance_peak_against_series(self):
        # oracle first: partial geometric sum to n=200
        j = JunctionCoupling(0.75)
        oracle = abs(geometric_gca(0.0, j.rho, j.tau, 1.0)) ** 2
        value = abs(g_ca(0.0, j, 1.0)) ** 2
        assert abs(value / oracle - 1.0) < 1e-12
        assert value == pytest.approx(7.0, rel=1e-12)

    def test_antiresonance_against_series(self):
        j = JunctionCoupling(0.75)
        oracle = abs(geometric_gca(math.pi, j.rho, j.tau, 1.0)) ** 2
        value = abs(g_ca(math.pi, j, 1.0)) ** 2
        assert abs(value / oracle - 1.0) < 1e-10
        assert value == pytest.approx(1.0 / 7.0, rel=1e-10)

    @given(
        rho=st.floats(0.0, 0.95),
        omega=st.floats(-50.0, 50.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_series_consistency(self, rho, omega):
        """Closed form matches the truncated sum within the analytic tail bound."""
        j = JunctionCoupling(rho)
        n = 150
        approx = geometric_gca(omega, j.rho, j.tau, 1.0, n_terms=n)
        bound = j.tau * rho ** (n + 1) / (1.0 - rho) if rho > 0 else 0.0
        assert abs(g_ca(omega, j, 1.0) - approx) <= bound + 1e-12

    def test_periodicity(self):
        j = JunctionCoupling(0.9)
        T = 0.7
        fsr = 2.0 * math.pi / T
        rng = np.random.default_rng(7)
        for w in rng.uniform(-40, 40, 50):
            assert abs(g_ca(w + fsr, j, T) - g_ca(w, j, T)) < 1e-11

    def test_rejects_bad_round_trip(self):
        with pytest.raises(ValueError):
            g_ca(1.0, JunctionCoupling(0.5), 0.0)

    def test_vectorized(self):
        j = JunctionCoupling(0.5)
        w = np.linspace(-5, 5, 11)
        vals = g_ca(w, j, 1.0)
        assert vals.shape == (11,)
        assert vals[5] == g_ca(0.0, j, 1.0)


class TestGba:
    def test_dc_value(self):
        j = JunctionCoupling(0.75)
        assert g_ba(0.0, j, 1.0) == pytest.approx(1.0 + 0.0j)

    def test_rho_zero_is_pure_delay(self):
        j = JunctionCoupling(0.0)
        for w in (0.3, -2.0, 7.7):
            assert g_ba(w, j, 1.0) == pytest.approx(np.exp(1j * w))

    def test_unimodular_at_random_frequencies(self):
        j = JunctionCoupling(0.75)
        rng = np.random.default_rng(42)
        w = rng.uniform(-100, 100, 1000)
        assert np.max(np.abs(np.abs(g_ba(w, j, 1.0)) - 1.0)) < 1e-12

    @given(rho=st.floats(0.0, 0.999), omega=st.floats(-200.0, 200.0))
    @settings(max_examples=120, deadline=None)
    def test_unimodularity_property(self, rho, omega):
        assert abs(abs(g_ba(omega, JunctionCoupling(rho), 1.0)) - 1.0) < 1e-12


class TestGab:
    def test_conjugate_of_forward(self):
        j = JunctionCoupling(0.0)
        assert g_ab(1.3, j, 1.0) == pytest.approx(np.exp(-1.3j))

    @given(rho=st.floats(0.0, 0.999), omega=st.floats(-50.0, 50.0))
    @settings(max_examples=100, deadline=None)
    def test_inverse_identity(self, rho, omega):
        j = JunctionCoupling(rho)
        assert abs(g_ab(omega, j, 1.0) * g_ba(omega, j, 1.0) - 1.0) < 1e-14

    def test_equals_time_reversed_forward(self):
        # conjugation is the same as running the loop backwards
        j = JunctionCoupling(0.75)
        w = math.pi / 2
        z = np.exp(-1j * w)  # exp(i w (-T)) with T = 1
        reversed_T = z * (1.0 - j.rho * np.conj(z)) / (1.0 - j.rho * z)
        assert g_ab(w, j, 1.0) == pytest.approx(reversed_T, abs=1e-14)


class TestFsrIntegral:
    def test_flat_case_exact(self):
        assert fsr_integral(JunctionCoupling(0.0), 1.0) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("rho", [0.5, 0.75, 0.98])
    def test_state_count_conserved(self, rho):
        assert abs(fsr_integral(JunctionCoupling(rho), 1.0) - 1.0) < 1e-6

    def test_multiple_periods_high_coupling(self):
        val = fsr_integral(JunctionCoupling(0.98), 1.0, n_periods=3,
                           quadrature_points=8192)
        assert abs(val - 1.0) < 1e-5

    def test_rejects_nonpositive_counts(self):
        j = JunctionCoupling(0.5)
        with pytest.raises(ValueError):
            fsr_integral(j, 1.0, n_periods=0)
        with pytest.raises(ValueError):
            fsr_integral(j, 1.0, quadrature_points=0)


class TestDensityOfStates:
    def test_flat_profile_at_zero_coupling(self):
        grid = FrequencyGrid(-10.0, 0.1, 201)
        _, dos = density_of_states_profile(JunctionCoupling(0.0), 1.0, grid)
        assert np.allclose(dos, 1.0, atol=1e-14)

    def test_peaks_at_fsr_multiples(self):
        T = 1.0
        fsr = 2.0 * math.pi / T
        grid = FrequencyGrid(-2.0 * fsr, fsr / 64, 257)
        omega, dos = density_of_states_profile(JunctionCoupling(0.75), T, grid)
        for mult in (-2, -1, 0, 1, 2):
            idx = int(np.argmin(np.abs(omega - mult * fsr)))
            assert dos[idx] == pytest.approx(7.0, rel=1e-9)

    def test_even_and_periodic(self):
        T = 1.0
        fsr = 2.0 * math.pi / T
        j = JunctionCoupling(0.6)
        w = np.linspace(0.0, fsr, 33)
        _, dos_pos = density_of_states_profile(
            j, T, FrequencyGrid(0.0, fsr / 32, 33))
        dos_neg = np.abs(np.array([g_ca(-x, j, T) for x in w])) ** 2
        dos_shift = np.abs(np.array([g_ca(x + fsr, j, T) for x in w])) ** 2
        assert np.max(np.abs(dos_pos - dos_neg)) < 1e-12
        assert np.max(np.abs(dos_pos - dos_shift)) < 1e-11

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            FrequencyGrid(0.0, -1.0, 10)
        with pytest.raises(ValueError):
            FrequencyGrid(0.0, 1.0, 0)
