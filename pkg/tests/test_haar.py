"""Haar sampling statistics, determinism, and the concentration experiment."""

import math

import numpy as np
import pytest

from qilab.channels import KrausChannel, average_fidelity_exact, compose, make_compressor
from qilab.haar import (
    LEVY_C,
    SeededSampler,
    concentration_experiment,
    levy_tail_bound,
    sample_haar_state,
    sample_haar_states,
    sample_haar_unitary,
)


class TestSeededSampler:
    def test_same_stream_replays(self):
        s = SeededSampler(123, 4)
        a = s.rng().standard_normal(16)
        b = s.rng().standard_normal(16)
        assert np.array_equal(a, b)

    def test_streams_differ(self):
        s = SeededSampler(123)
        a = s.at(0).rng().standard_normal(8)
        b = s.at(1).rng().standard_normal(8)
        assert not np.array_equal(a, b)

    def test_children_are_independent_and_stable(self):
        s = SeededSampler(9)
        c1 = s.child("enc", 3)
        c2 = s.child("enc", 4)
        assert c1 == s.child("enc", 3)
        assert c1 != c2


class TestHaarStates:
    def test_norm_and_determinism(self):
        psi = sample_haar_state(1, SeededSampler(5))
        assert np.linalg.norm(psi.amplitudes) == pytest.approx(1.0)
        again = sample_haar_state(1, SeededSampler(5))
        assert np.array_equal(psi.amplitudes, again.amplitudes)

    def test_range_check(self):
        with pytest.raises(ValueError):
            sample_haar_state(0, SeededSampler(5))
        with pytest.raises(ValueError):
            sample_haar_state(13, SeededSampler(5))

    def test_first_coordinate_moment(self):
        # E|<0|psi>|^2 = 1/d; 1e5 samples at n=2.
        count = 100_000
        states = sample_haar_states(2, count, SeededSampler(7))
        vals = np.abs(states[:, 0]) ** 2
        stderr = vals.std(ddof=1) / math.sqrt(count)
        assert abs(vals.mean() - 0.25) <= 5 * stderr

    def test_mean_density_is_maximally_mixed(self):
        count = 100_000
        states = sample_haar_states(1, count, SeededSampler(8))
        mean_rho = np.einsum("si,sj->ij", states, states.conj()) / count
        # Entrywise 5-sigma window; per-entry std is O(1/sqrt(count)).
        assert np.max(np.abs(mean_rho - np.eye(2) / 2)) <= 5 / math.sqrt(count)

    def test_unitary_invariance_of_moments(self):
        count = 20_000
        u = sample_haar_unitary(2, SeededSampler(99))
        states = sample_haar_states(2, count, SeededSampler(11))
        rotated = states @ u.T
        raw = np.mean(np.abs(states[:, 0]) ** 4)
        rot = np.mean(np.abs(rotated[:, 0]) ** 4)
        # Fourth moment of one coordinate: 2/(d(d+1)) = 0.1 at d=4.
        assert abs(raw - rot) < 0.01
        assert abs(raw - 0.1) < 0.01

    def test_batch_matches_block_streams(self):
        states = sample_haar_states(1, 3, SeededSampler(21))
        single = sample_haar_state(1, SeededSampler(21).at(0))
        assert np.allclose(states[0], single.amplitudes)


class TestHaarUnitary:
    def test_unitarity(self):
        u = sample_haar_unitary(3, SeededSampler(1))
        assert np.max(np.abs(u.conj().T @ u - np.eye(8))) < 1e-9

    def test_determinism(self):
        a = sample_haar_unitary(2, SeededSampler(2))
        b = sample_haar_unitary(2, SeededSampler(2))
        assert np.array_equal(a, b)

    def test_first_column_moments_match_haar_states(self):
        # Column 0 of a Haar unitary is itself a Haar state.
        cols = np.stack(
            [sample_haar_unitary(1, SeededSampler(3).at(i))[:, 0] for i in range(4000)]
        )
        vals = np.abs(cols[:, 0]) ** 2
        states = sample_haar_states(1, 4000, SeededSampler(4))
        ref = np.abs(states[:, 0]) ** 2
        stderr = math.hypot(vals.std(ddof=1), ref.std(ddof=1)) / math.sqrt(4000)
        assert abs(vals.mean() - ref.mean()) <= 5 * stderr

    def test_left_invariance_statistic(self):
        fixed = sample_haar_unitary(1, SeededSampler(55))
        entries = []
        rotated = []
        for i in range(4000):
            u = sample_haar_unitary(1, SeededSampler(56).at(i))
            entries.append(abs(u[0, 0]) ** 2)
            rotated.append(abs((fixed @ u)[0, 0]) ** 2)
        entries, rotated = np.asarray(entries), np.asarray(rotated)
        stderr = math.hypot(entries.std(ddof=1), rotated.std(ddof=1)) / math.sqrt(4000)
        assert abs(entries.mean() - rotated.mean()) <= 5 * stderr


class TestLevyBound:
    def test_zero_epsilon(self):
        assert levy_tail_bound(0.0, 2047, 4.0) == 2.0

    def test_hand_computed_value(self):
        # eps = 0.5, r = 2*2^10 - 1, eta = 4, C = 1/(18 pi^3):
        # 2 exp(-2 * C * 2048 * 0.25 / 16) independently evaluated.
        expected = 2.0 * math.exp(-2.0 * (1.0 / (18.0 * math.pi**3)) * 2048 * 0.25 / 16.0)
        assert levy_tail_bound(0.5, 2 * 2**10 - 1, 4.0) == pytest.approx(expected, rel=1e-12)

    def test_monotonicity(self):
        eps = np.linspace(0.0, 1.0, 11)
        vals = [levy_tail_bound(e, 511, 4.0) for e in eps]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        rs = [63, 127, 255, 511]
        vals_r = [levy_tail_bound(0.3, r, 4.0) for r in rs]
        assert all(a >= b for a, b in zip(vals_r, vals_r[1:]))

    def test_constant_value(self):
        assert LEVY_C == pytest.approx(1.0 / (18.0 * math.pi**3), rel=1e-15)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            levy_tail_bound(-0.1, 10, 4.0)
        with pytest.raises(ValueError):
            levy_tail_bound(0.1, 10, 0.0)


class TestConcentrationExperiment:
    def test_identity_channel_is_constant(self):
        report = concentration_experiment(
            KrausChannel.identity(2), 500, [0.05, 0.2], SeededSampler(31)
        )
        assert report.empirical_mean == pytest.approx(1.0, abs=1e-12)
        assert report.empirical_std == pytest.approx(0.0, abs=1e-12)
        assert report.tail_frequencies == (0.0, 0.0)

    def test_replacement_channel_constant_value(self):
        report = concentration_experiment(
            KrausChannel.completely_depolarizing(3), 300, [0.1], SeededSampler(32)
        )
        assert report.empirical_mean == pytest.approx(1 / 8, abs=1e-12)
        assert report.empirical_std == pytest.approx(0.0, abs=1e-12)

    def test_std_decreases_with_dimension(self):
        stds = []
        for n in (4, 6, 8):
            comp, decomp = make_compressor("trace_out", n, n - 1)
            channel = compose(decomp, comp)
            report = concentration_experiment(channel, 2000, [0.5], SeededSampler(33))
            stds.append(report.empirical_std)
        assert stds[0] > stds[1] > stds[2]

    def test_mean_matches_exact_average_fidelity(self):
        comp, decomp = make_compressor("trace_out", 3, 2)
        channel = compose(decomp, comp)
        report = concentration_experiment(channel, 20_000, [0.5], SeededSampler(34))
        exact = average_fidelity_exact(channel)
        stderr = report.empirical_std / math.sqrt(report.samples)
        assert abs(report.empirical_mean - exact) <= 5 * stderr

    def test_dimension_mismatch_rejected(self):
        comp, _ = make_compressor("trace_out", 2, 1)
        with pytest.raises(ValueError, match="square"):
            concentration_experiment(comp, 10, [0.1], SeededSampler(35))
