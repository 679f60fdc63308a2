import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringecho import (
    DeltaTrain,
    IncommensurateGrid,
    JunctionCoupling,
    SampledSignal,
    apply_train,
    convolve,
    correlate,
    g_ba,
    kernel_ab,
    kernel_ba,
    kernel_ca,
    unit_train,
)

J75 = JunctionCoupling(0.75)


def impulse(T, stride, n_trips):
    vals = np.zeros(stride * n_trips, dtype=complex)
    vals[0] = 1.0
    return SampledSignal(0.0, T / stride, vals)


class TestSampledSignal:
    def test_times_and_energy(self):
        s = SampledSignal(-1.0, 0.5, np.array([1.0, 2.0, 2.0j]))
        assert np.allclose(s.times, [-1.0, -0.5, 0.0])
        assert s.energy() == pytest.approx(4.5)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            SampledSignal(0.0, 0.0, np.ones(3))
        with pytest.raises(ValueError):
            SampledSignal(0.0, 1.0, np.array([1.0, np.inf]))


class TestKernelWeights:
    def test_ca_no_cavity(self):
        assert kernel_ca(JunctionCoupling(0.0), 1.0).weights == {0: 1.0}

    def test_ca_weights_by_recurrence(self):
        # oracle: c_{n+1} = rho * c_n starting from tau
        train = kernel_ca(J75, 1.0)
        c = J75.tau
        for n in range(30):
            assert train.weight(n) == pytest.approx(c, rel=1e-14)
            c *= J75.rho
        assert train.weight(0) == pytest.approx(0.661438, abs=1e-6)
        assert train.weight(1) == pytest.approx(0.496078, abs=1e-6)
        assert train.weight(2) == pytest.approx(0.372059, abs=1e-6)

    def test_ba_no_cavity_is_delay(self):
        assert kernel_ba(JunctionCoupling(0.0), 1.0).weights == {1: 1.0}

    def test_ab_no_cavity_is_advance(self):
        assert kernel_ab(JunctionCoupling(0.0), 1.0).weights == {-1: 1.0}

    def test_ba_first_weights(self):
        train = kernel_ba(J75, 1.0)
        assert train.weight(0) == -0.75
        assert train.weight(1) == pytest.approx(0.4375, rel=1e-15)
        assert train.weight(2) == pytest.approx(0.328125, rel=1e-15)

    def test_ab_mirrors_ba(self):
        ba = kernel_ba(J75, 1.0)
        ab = kernel_ab(J75, 1.0)
        assert set(ab.weights) == {-k for k in ba.weights}
        for k, c in ba.weights.items():
            assert ab.weight(-k) == c

    def test_ab_explicit(self):
        j = JunctionCoupling(0.6)
        train = kernel_ab(j, 1.0)
        assert train.weight(0) == -0.6
        assert train.weight(-1) == pytest.approx(0.64, rel=1e-14)

    @pytest.mark.parametrize("rho", [0.0, 0.3, 0.75, 0.97])
    def test_unitarity(self, rho):
        j = JunctionCoupling(rho)
        for maker in (kernel_ca, kernel_ba, kernel_ab):
            assert abs(maker(j, 1.0).sum_sq() - 1.0) < 1e-10

    def test_tail_bound_recorded(self):
        train = kernel_ca(J75, 1.0, eps=1e-6)
        n_max = max(train.weights)
        expected = J75.tau * J75.rho ** (n_max + 1) / (1.0 - J75.rho)
        assert train.tail_bound == pytest.approx(expected, rel=1e-12)
        assert all(abs(c) >= 1e-6 for c in train.weights.values())

    def test_rejects_bad_eps(self):
        with pytest.raises(ValueError):
            kernel_ca(J75, 1.0, eps=0.0)


class TestTrainAlgebra:
    def test_convolution_identity_element(self):
        f = kernel_ca(J75, 1.0)
        assert convolve(f, unit_train(1.0)).max_abs_diff(f) == 0.0

    def test_convolution_commutes(self):
        f = kernel_ca(J75, 1.0, eps=1e-8)
        g = kernel_ba(JunctionCoupling(0.5), 1.0, eps=1e-8)
        assert convolve(f, g).max_abs_diff(convolve(g, f)) < 1e-14

    def test_round_trip_inverse(self):
        inv = convolve(kernel_ab(J75, 1.0), kernel_ba(J75, 1.0))
        assert abs(inv.weight(0) - 1.0) < 1e-10
        spurious = max(abs(c) for k, c in inv.weights.items() if k != 0)
        assert spurious < 1e-10

    def test_convolve_rejects_period_mismatch(self):
        with pytest.raises(ValueError):
            convolve(kernel_ca(J75, 1.0), kernel_ca(J75, 2.0))

    def test_correlate_point_masses(self):
        a = DeltaTrain(1.0, {0: 3.0})
        b = DeltaTrain(1.0, {0: -2.0})
        assert correlate(a, b).weights == {0: -6.0}

    def test_correlate_ca_gives_geometric_memory(self):
        corr = correlate(kernel_ca(J75, 1.0), kernel_ca(J75, 1.0))
        for k in range(-10, 11):
            assert corr.weight(k) == pytest.approx(0.75 ** abs(k), abs=1e-12)

    def test_correlate_ba_is_unit(self):
        corr = correlate(kernel_ba(J75, 1.0), kernel_ba(J75, 1.0))
        assert abs(corr.weight(0) - 1.0) < 1e-10
        assert max(abs(c) for k, c in corr.weights.items() if k != 0) < 1e-10

    @given(rho=st.floats(0.0, 0.9), scale=st.floats(0.1, 3.0))
    @settings(max_examples=40, deadline=None)
    def test_convolution_linear_in_scaling(self, rho, scale):
        j = JunctionCoupling(rho)
        f = kernel_ca(j, 1.0, eps=1e-8)
        scaled = DeltaTrain(1.0, {k: scale * c for k, c in f.weights.items()})
        lhs = convolve(scaled, kernel_ba(j, 1.0, eps=1e-8))
        rhs = convolve(f, kernel_ba(j, 1.0, eps=1e-8))
        for k in lhs.weights:
            assert lhs.weight(k) == pytest.approx(scale * rhs.weight(k), abs=1e-12)


class TestApply:
    def test_identity_train(self):
        s = SampledSignal(0.0, 0.25, np.arange(8, dtype=complex))
        out = apply_train(unit_train(1.0), s)
        assert out.t0 == s.t0
        assert np.array_equal(out.values, s.values)

    def test_echo_train_from_impulse(self):
        stride = 4
        out = apply_train(kernel_ba(J75, 1.0), impulse(1.0, stride, 3))
        assert out.values[0] == -0.75
        assert out.values[stride] == pytest.approx(0.4375)
        assert out.values[2 * stride] == pytest.approx(0.328125)
        # nothing between lattice points
        assert np.all(out.values[1:stride] == 0.0)

    def test_parseval_energy_conserved(self):
        rng = np.random.default_rng(3)
        s = SampledSignal(
            -1.0, 0.125, rng.normal(size=64) + 1j * rng.normal(size=64)
        )
        out = apply_train(kernel_ba(J75, 1.0), s)
        assert abs(out.energy() - s.energy()) / s.energy() < 1e-10

    def test_round_trip_reconstruction(self):
        rng = np.random.default_rng(5)
        s = SampledSignal(0.0, 0.125, rng.normal(size=48) + 0j)
        back = apply_train(kernel_ab(J75, 1.0), apply_train(kernel_ba(J75, 1.0), s))
        i0 = round((s.t0 - back.t0) / s.dt)
        assert np.max(np.abs(back.values[i0 : i0 + len(s)] - s.values)) < 1e-9

    def test_incommensurate_grid_rejected(self):
        s = SampledSignal(0.0, 0.3, np.ones(4, dtype=complex))
        with pytest.raises(IncommensurateGrid):
            apply_train(kernel_ba(J75, 1.0), s)

    def test_spectrum_matches_transfer_function(self):
        """DFT of the sampled echo train reproduces the spectral response."""
        T = 1.0
        out = apply_train(kernel_ba(J75, T), impulse(T, 8, 2))
        ws = np.linspace(-8.0, 8.0, 61)
        for w in ws:
            dft = np.sum(out.values * np.exp(1j * w * out.times))
            assert abs(dft - g_ba(w, J75, T)) < 1e-8


class TestSerialization:
    def test_json_round_trip(self):
        train = kernel_ab(J75, 0.5, eps=1e-6)
        clone = DeltaTrain.from_json(train.to_json())
        assert clone.period == train.period
        assert clone.eps == train.eps
        assert clone.tail_bound == train.tail_bound
        assert clone.weights == train.weights

    def test_json_fields(self):
        import json

        obj = json.loads(kernel_ca(J75, 1.0, eps=1e-3).to_json())
        assert set(obj) == {"T", "eps", "weights", "tail_bound"}
        ks = [k for k, _ in obj["weights"]]
        assert ks == sorted(ks)

    def test_truncated_folds_tail(self):
        train = kernel_ca(J75, 1.0, eps=1e-12)
        cut = train.truncated(1e-3)
        dropped = sum(
            abs(c) for c in train.weights.values() if abs(c) < 1e-3
        )
        assert cut.tail_bound == pytest.approx(train.tail_bound + dropped)
        assert all(abs(c) >= 1e-3 for c in cut.weights.values())
