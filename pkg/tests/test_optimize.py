"""The adversarial fidelity ascent: gradients, retraction, monotonicity, ceilings."""

import numpy as np
import pytest

from qilab.channels import average_fidelity_exact, compose, entanglement_fidelity
from qilab.haar import SeededSampler, haar_isometry
from qilab.optimize import (
    IsometryParams,
    optimize_compression,
    pair_gradient,
    pair_objective,
    polar_retract,
)


class TestIsometryParams:
    def test_accepts_isometry(self):
        v = haar_isometry(8, 4, SeededSampler(1))
        w = haar_isometry(8, 2, SeededSampler(2))
        IsometryParams(v, w, e1=2, e2=1)

    def test_rejects_non_isometry(self):
        v = np.ones((8, 4))
        with pytest.raises(ValueError, match="isometry"):
            IsometryParams(v, haar_isometry(8, 2, SeededSampler(3)), e1=2, e2=1)


class TestGradient:
    def test_matches_central_finite_differences(self):
        n, m, e1, e2 = 2, 1, 2, 1
        v = haar_isometry(2 ** (m + e1), 2**n, SeededSampler(4))
        w = haar_isometry(2 ** (n + e2), 2**m, SeededSampler(5))
        gv, gw = pair_gradient(v, w, n, m, e1, e2)
        h = 1e-5
        rng = np.random.default_rng(6)
        for _ in range(12):
            which = rng.integers(2)
            mat = v if which == 0 else w
            i = rng.integers(mat.shape[0])
            j = rng.integers(mat.shape[1])
            part = rng.integers(2)  # real or imaginary direction
            delta = h if part == 0 else 1j * h
            bump = np.zeros_like(mat)
            bump[i, j] = delta
            if which == 0:
                up = pair_objective(v + bump, w, n, m, e1, e2)
                dn = pair_objective(v - bump, w, n, m, e1, e2)
                grad_entry = gv[i, j]
            else:
                up = pair_objective(v, w + bump, n, m, e1, e2)
                dn = pair_objective(v, w - bump, n, m, e1, e2)
                grad_entry = gw[i, j]
            fd = (up - dn) / (2 * h)
            # Library gradient is 2 d f / d conj(X), so the directional
            # derivative along E is Re(conj(G_ij) * E_ij).
            analytic = np.real(np.conj(grad_entry) * (delta / h))
            assert fd == pytest.approx(analytic, rel=1e-4, abs=1e-10)


class TestRetraction:
    def test_idempotent_on_isometries(self):
        v = haar_isometry(16, 4, SeededSampler(7))
        assert np.max(np.abs(polar_retract(v) - v)) < 1e-10

    def test_returns_isometry(self):
        rng = np.random.default_rng(8)
        m = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
        v = polar_retract(m)
        assert np.max(np.abs(v.conj().T @ v - np.eye(3))) < 1e-12


class TestOptimizeCompression:
    def test_degenerate_no_compression(self):
        pair, trace = optimize_compression(2, 2, iters=5, restarts=1, sampler=SeededSampler(9))
        assert trace.best_favg == pytest.approx(1.0, abs=1e-9)

    def test_two_to_one_stays_under_ceiling(self):
        pair, trace = optimize_compression(2, 1, iters=200, restarts=3, sampler=SeededSampler(10))
        assert trace.best_favg <= 0.6 + 1e-6
        # The ascent should at least match the built-in compressor value 0.4.
        assert trace.best_favg >= 0.4 - 1e-6

    def test_three_to_one_ceiling(self):
        pair, trace = optimize_compression(3, 1, iters=150, restarts=2, sampler=SeededSampler(11))
        assert trace.best_favg <= (2 + 1) / (8 + 1) + 1e-6

    def test_histories_monotone(self):
        _, trace = optimize_compression(2, 1, iters=100, restarts=2, sampler=SeededSampler(12))
        for hist in trace.restart_histories:
            assert all(b >= a for a, b in zip(hist, hist[1:]))

    def test_returned_pair_is_valid_and_matches_best(self):
        (comp, decomp), trace = optimize_compression(
            3, 2, iters=150, restarts=2, sampler=SeededSampler(13)
        )
        channel = compose(decomp, comp)
        assert average_fidelity_exact(channel) == pytest.approx(trace.best_favg, abs=1e-9)
        assert entanglement_fidelity(channel) <= trace.bound.fe_bound + 1e-9

    def test_deterministic_given_seed(self):
        _, t1 = optimize_compression(2, 1, iters=50, restarts=2, sampler=SeededSampler(14))
        _, t2 = optimize_compression(2, 1, iters=50, restarts=2, sampler=SeededSampler(14))
        assert t1.objective_history == t2.objective_history

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            optimize_compression(7, 1, iters=10, restarts=1, sampler=SeededSampler(15))
        with pytest.raises(ValueError):
            optimize_compression(3, 4, iters=10, restarts=1, sampler=SeededSampler(16))
        with pytest.raises(ValueError):
            optimize_compression(2, 1, iters=0, restarts=1, sampler=SeededSampler(17))
