import math

import numpy as np
import pytest

from ringecho import (
    JunctionCoupling,
    SampledSignal,
    StepTooCoarse,
    echo_sum_cavity_field,
    fig4_dataset,
    g_ca,
    g_ca_effective,
    kappa,
    peak_ratio,
    quasimode_commutator,
    quasimode_evolve,
    quasimode_field_error,
    quasimode_output,
)


def gaussian_pulse(width, dt, t_lo, t_hi):
    t = np.arange(t_lo, t_hi, dt)
    return SampledSignal(t[0], dt, np.exp(-(t**2) / (2.0 * width**2)).astype(complex))


class TestKappa:
    def test_exact_value_and_round_trip(self):
        q = kappa(JunctionCoupling(0.97), 1.0, "exact")
        assert q.kappa == pytest.approx(0.0304592, abs=1e-7)
        assert math.exp(-q.kappa * 1.0) == pytest.approx(0.97, rel=1e-14)

    def test_linear_value(self):
        q = kappa(JunctionCoupling(0.97), 1.0, "linear")
        assert q.kappa == pytest.approx(0.03, rel=1e-14)

    def test_flavors_agree_near_closed_junction(self):
        j = JunctionCoupling(0.9995)
        rates = [kappa(j, 1.0, f).kappa for f in ("exact", "linear", "transmissive")]
        base = 1.0 - j.rho
        for r in rates:
            assert abs(r - base) / base < 1e-3

    def test_exact_rejects_open_junction(self):
        with pytest.raises(ValueError):
            kappa(JunctionCoupling(0.0), 1.0, "exact")

    def test_unknown_flavorrejected(self):
        with pytest.raises(ValueError):
            kappa(JunctionCoupling(0.5), 1.0, "other")


class TestEffectiveResponse:
    def test_dc_peak_value(self):
        j = JunctionCoupling(0.75)
        peak = abs(g_ca_effective(0.0, j, 1.0))
        assert peak == pytest.approx(j.tau / math.log(1.0 / 0.75), rel=1e-14)

    def test_peak_ratio_values(self):
        # frozen from the two closed forms evaluated directly
        assert peak_ratio(JunctionCoupling(0.97)) == pytest.approx(
            0.9849238531587152, abs=1e-12
        )
        assert peak_ratio(JunctionCoupling(0.70)) == pytest.approx(
            0.8411019756171388, abs=1e-12
        )

    def test_ratio_flags_regime(self):
        assert peak_ratio(JunctionCoupling(0.99)) > 0.99
        assert peak_ratio(JunctionCoupling(0.70)) < 0.85

    def test_lorentzian_matches_exact_near_resonance_high_q(self):
        # the in-band deficit is governed by 1 - peak_ratio
        j = JunctionCoupling(0.995)
        q = kappa(j, 1.0, "exact")
        budget = 1.5 * (1.0 - peak_ratio(j))
        for w in np.linspace(-0.5 * q.kappa, 0.5 * q.kappa, 7):
            exact = g_ca(w, j, 1.0)
            approx = g_ca_effective(w, j, 1.0)
            assert abs(approx - exact) / abs(exact) < budget


class TestQuasimodeEvolve:
    def test_zero_input_zero_output(self):
        a = SampledSignal(0.0, 0.01, np.zeros(100, dtype=complex))
        q = kappa(JunctionCoupling(0.9), 1.0, "exact")
        assert np.all(quasimode_evolve(a, q).values == 0.0)

    def test_constant_drive_steady_state(self):
        a0 = 0.7 - 0.2j
        q = kappa(JunctionCoupling(0.75), 1.0, "exact")
        a = SampledSignal(0.0, 0.02, np.full(4000, a0))
        c = quasimode_evolve(a, q)
        assert c.values[-1] == pytest.approx(a0 * math.sqrt(2.0 / q.kappa), rel=1e-9)

    def test_step_guard(self):
        q = kappa(JunctionCoupling(0.5), 1.0, "exact")  # kappa = 0.693
        a = SampledSignal(0.0, 0.1, np.ones(10, dtype=complex))
        with pytest.raises(StepTooCoarse):
            quasimode_evolve(a, q)

    def test_matches_exact_envelope_at_097(self):
        """Reduced model tracks the exact echo-sum peak within 2 percent."""
        j = JunctionCoupling(0.97)
        a = gaussian_pulse(8.0, 1.0 / 8, -32.0, 32.0 + 6.0 / 0.0305)
        q = kappa(j, 1.0, "exact")
        c_qm = quasimode_evolve(a, q)
        c_ex = echo_sum_cavity_field(a, j, 1.0)
        pk_qm = np.max(np.abs(c_qm.values))
        pk_ex = np.max(np.abs(c_ex.values[: len(a)]))
        assert abs(pk_qm - pk_ex) / pk_ex < 0.02

    def test_regime_split(self):
        """L2 error below 1 percent deep in the high-Q regime, above 5 percent out of it."""
        a_hq = gaussian_pulse(20.0, 1.0 / 8, -80.0, 80.0 + 6.0 / math.log(1 / 0.99))
        assert quasimode_field_error(a_hq, JunctionCoupling(0.99), 1.0) < 0.01
        a_lq = gaussian_pulse(4.0, 1.0 / 8, -16.0, 16.0 + 25.0)
        assert quasimode_field_error(a_lq, JunctionCoupling(0.70), 1.0) > 0.05

    def test_spectral_response_matches_lorentzian(self):
        """Impulse response of the integrator transforms to the Lorentzian.

        The impulse sits mid-window (a boundary sample would be half-area
        under the piecewise-linear input reading) and the window covers the
        decay down to the tolerance.
        """
        q = kappa(JunctionCoupling(0.97), 1.0, "exact")
        dt = 0.004
        n = int(520 / dt)
        i0 = 10
        vals = np.zeros(n, dtype=complex)
        vals[i0] = 1.0 / dt  # unit-area impulse
        c = quasimode_evolve(SampledSignal(0.0, dt, vals), q)
        for w in np.linspace(-0.2, 0.2, 9):
            dft = np.sum(c.values * np.exp(1j * w * c.times)) * dt
            lorentzian = (
                math.sqrt(2.0 * q.kappa) / (q.kappa - 1j * w)
            ) * np.exp(1j * w * i0 * dt)
            assert abs(dft - lorentzian) / abs(lorentzian) < 1e-6


class TestQuasimodeOutput:
    def test_zero_in_zero_out(self):
        z = SampledSignal(0.0, 0.01, np.zeros(10, dtype=complex))
        q = kappa(JunctionCoupling(0.9), 1.0, "exact")
        assert np.all(quasimode_output(z, z, q).values == 0.0)

    def test_energy_conserved_for_pulse(self):
        q = kappa(JunctionCoupling(0.9), 1.0, "exact")  # kappa ~ 0.105
        a = gaussian_pulse(4.0, 0.005, -20.0, 20.0 + 8.0 / q.kappa)
        c = quasimode_evolve(a, q)
        b = quasimode_output(a, c, q)
        assert abs(b.energy() - a.energy()) / a.energy() < 1e-6

    def test_transfer_is_unimodular(self):
        q = kappa(JunctionCoupling(0.9), 1.0, "exact")
        for w in np.linspace(-3, 3, 13):
            h = (q.kappa + 1j * w) / (q.kappa - 1j * w)
            assert abs(abs(h) - 1.0) < 1e-15

    def test_grid_mismatch_rejected(self):
        q = kappa(JunctionCoupling(0.9), 1.0, "exact")
        a = SampledSignal(0.0, 0.01, np.zeros(10, dtype=complex))
        c = SampledSignal(0.5, 0.01, np.zeros(10, dtype=complex))
        with pytest.raises(ValueError):
            quasimode_output(a, c, q)


class TestQuasimodeCommutator:
    def test_unity_at_equal_times(self):
        q = kappa(JunctionCoupling(0.75), 1.0, "exact")
        assert quasimode_commutator(0.0, q) == 1.0

    def test_exact_flavor_interpolates_lattice(self):
        j = JunctionCoupling(0.75)
        q = kappa(j, 1.0, "exact")
        for k in range(21):
            assert quasimode_commutator(k * 1.0, q) == pytest.approx(
                j.rho**k, abs=1e-14
            )

    def test_linear_flavor_detaches_at_moderate_coupling(self):
        q = kappa(JunctionCoupling(0.70), 1.0, "linear")
        approx = quasimode_commutator(3.0, q)
        assert approx == pytest.approx(math.exp(-0.9), rel=1e-14)
        assert approx == pytest.approx(0.40657, abs=1e-5)
        exact_env = 0.70**3
        assert exact_env == pytest.approx(0.343, abs=1e-12)
        assert abs(approx - exact_env) > 0.06  # the visible gap


class TestFig4Dataset:
    def test_envelope_starts_at_one(self):
        for rho in (0.97, 0.70):
            _, _, env = fig4_dataset(JunctionCoupling(rho), "linear", 0.01)
            assert env[0] == 1.0

    def test_rendered_peaks_equal_weights(self):
        dt_sep, rendered, _ = fig4_dataset(
            JunctionCoupling(0.97), "linear", 0.01, n_points=10001
        )
        for k in (0, 1, 2, 5):
            idx = int(np.argmin(np.abs(dt_sep - k)))
            assert rendered[idx] == pytest.approx(0.97**k, rel=1e-3)

    def test_exact_flavor_envelope_touches_peaks(self):
        j = JunctionCoupling(0.70)
        dt_sep, rendered, env = fig4_dataset(j, "exact", 0.005, n_points=20001)
        for k in range(6):
            idx = int(np.argmin(np.abs(dt_sep - k)))
            assert env[idx] == pytest.approx(rendered[idx], rel=1e-3)

    def test_open_junction_linear_flavor(self):
        dt_sep, rendered, env = fig4_dataset(JunctionCoupling(0.0), "linear", 0.01)
        assert np.allclose(env, np.exp(-dt_sep))
        with pytest.raises(ValueError):
            fig4_dataset(JunctionCoupling(0.0), "exact", 0.01)
