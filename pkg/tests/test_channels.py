"""Kraus channels, the fidelity relation, and the compression fidelity ceilings."""

import math

import numpy as np
import pytest

from qilab.channels import (
    KrausChannel,
    apply,
    average_fidelity_exact,
    average_fidelity_mc,
    compose,
    entanglement_fidelity,
    entanglement_fidelity_choi,
    incompressibility_bound,
    make_compressor,
    state_self_fidelities,
)
from qilab.haar import SeededSampler, haar_isometry, sample_haar_states
from qilab.states import DensityOperator, PureState, fidelity, partial_trace

PLUS = PureState.from_vector(np.array([1.0, 1.0]) / math.sqrt(2))


def random_channel(n: int, env_qubits: int, sampler: SeededSampler) -> KrausChannel:
    """Random square channel from a Haar isometry dilation."""
    v = haar_isometry(2 ** (n + env_qubits), 2**n, sampler)
    return KrausChannel.from_isometry(v, n, env_qubits, n)


class TestKrausChannelValidation:
    def test_completeness_enforced(self):
        with pytest.raises(ValueError, match="completeness"):
            KrausChannel((np.eye(2) * 0.5,), 1, 1)

    def test_shape_enforced(self):
        with pytest.raises(ValueError, match="shape"):
            KrausChannel((np.eye(4),), 1, 1)

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="at least one"):
            KrausChannel((), 1, 1)

    def test_json_roundtrip(self):
        ch = random_channel(2, 1, SeededSampler(1))
        back = KrausChannel.from_json(ch.to_json())
        assert all(np.allclose(a, b) for a, b in zip(back.kraus_ops, ch.kraus_ops))


class TestApply:
    def test_identity(self):
        rho = DensityOperator.maximally_mixed(2)
        out = apply(KrausChannel.identity(2), rho)
        assert np.allclose(out.matrix, rho.matrix)

    def test_reset_channel_forces_output(self):
        rho = PLUS.density()
        out = apply(KrausChannel.reset_to_basis(1), rho)
        assert np.allclose(out.matrix, PureState.basis(1, 0).density().matrix)

    def test_measurement_dephases_plus(self):
        out = apply(KrausChannel.computational_measurement(1), PLUS.density())
        assert np.allclose(out.matrix, np.eye(2) / 2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply(KrausChannel.identity(2), DensityOperator.maximally_mixed(1))

    def test_preserves_validity_on_random_fixtures(self):
        sampler = SeededSampler(2)
        for i in range(20):
            ch = random_channel(2, (i % 2) + 1, sampler.at(i))
            states = sample_haar_states(2, 1, sampler.child("state", i))
            rho = PureState(states[0], 2).density()
            out = apply(ch, rho)  # DensityOperator validates trace/psd
            assert out.n == 2


class TestCompose:
    def test_identity_neutral(self):
        ch = random_channel(2, 1, SeededSampler(3))
        composed = compose(KrausChannel.identity(2), ch)
        rho = DensityOperator.maximally_mixed(2)
        assert np.allclose(apply(composed, rho).matrix, apply(ch, rho).matrix)

    def test_kraus_count_multiplies(self):
        comp, decomp = make_compressor("trace_out", 2, 1)
        composed = compose(decomp, comp)
        assert len(composed.kraus_ops) == len(comp.kraus_ops) * len(decomp.kraus_ops)

    def test_matches_sequential_application(self):
        sampler = SeededSampler(4)
        first = random_channel(2, 1, sampler.at(0))
        second = random_channel(2, 2, sampler.at(1))
        rho = PureState(sample_haar_states(2, 1, sampler.child("s"))[0], 2).density()
        via_compose = apply(compose(second, first), rho)
        sequential = apply(second, apply(first, rho))
        assert np.allclose(via_compose.matrix, sequential.matrix, atol=1e-12)

    def test_dimension_mismatch(self):
        comp, _ = make_compressor("trace_out", 2, 1)
        with pytest.raises(ValueError, match="compose"):
            compose(comp, comp)


class TestEntanglementFidelity:
    def test_identity(self):
        assert entanglement_fidelity(KrausChannel.identity(3)) == pytest.approx(1.0)

    def test_measurement_channel(self):
        assert entanglement_fidelity(
            KrausChannel.computational_measurement(1)
        ) == pytest.approx(0.5)

    def test_replacement_channel(self):
        assert entanglement_fidelity(
            KrausChannel.completely_depolarizing(1)
        ) == pytest.approx(0.25)

    def test_choi_path_agrees(self):
        sampler = SeededSampler(5)
        for i in range(10):
            ch = random_channel(2, (i % 2) + 1, sampler.at(i))
            assert entanglement_fidelity(ch) == pytest.approx(
                entanglement_fidelity_choi(ch), abs=1e-9
            )

    def test_non_square_rejected(self):
        comp, _ = make_compressor("trace_out", 2, 1)
        with pytest.raises(ValueError, match="square"):
            entanglement_fidelity(comp)


class TestAverageFidelity:
    def test_identity(self):
        assert average_fidelity_exact(KrausChannel.identity(2)) == pytest.approx(1.0)

    def test_measurement_channel(self):
        val = average_fidelity_exact(KrausChannel.computational_measurement(1))
        assert val == pytest.approx(2 / 3)

    def test_replacement_channel_all_dims(self):
        for n in (1, 2, 3):
            val = average_fidelity_exact(KrausChannel.completely_depolarizing(n))
            assert val == pytest.approx(1 / 2**n)

    def test_mc_identity(self):
        mean, stderr = average_fidelity_mc(KrausChannel.identity(2), 100, SeededSampler(6))
        assert mean == pytest.approx(1.0, abs=1e-12)
        assert stderr == pytest.approx(0.0, abs=1e-12)

    def test_mc_measurement_channel(self):
        mean, stderr = average_fidelity_mc(
            KrausChannel.computational_measurement(1), 100_000, SeededSampler(7)
        )
        assert abs(mean - 2 / 3) <= 5 * stderr

    def test_mc_replacement_zero_stderr(self):
        mean, stderr = average_fidelity_mc(
            KrausChannel.completely_depolarizing(2), 1000, SeededSampler(8)
        )
        assert mean == pytest.approx(0.25, abs=1e-12)
        assert stderr == pytest.approx(0.0, abs=1e-12)

    def test_state_self_fidelities_matches_apply(self):
        ch = random_channel(2, 2, SeededSampler(9))
        states = sample_haar_states(2, 5, SeededSampler(10))
        fast = state_self_fidelities(ch, states)
        for row, f_val in zip(states, fast):
            psi = PureState(row, 2)
            slow = fidelity(psi.density(), apply(ch, psi.density()))
            assert f_val == pytest.approx(slow, abs=1e-9)


class TestIncompressibilityBound:
    def test_no_compression(self):
        b = incompressibility_bound(3, 3)
        assert b.fe_bound == 1.0 and b.favg_bound == 1.0

    def test_two_to_one(self):
        b = incompressibility_bound(2, 1)
        assert b.fe_bound == pytest.approx(0.5)
        assert b.favg_bound == 3 / 5

    def test_one_qubit_compression_scaling(self):
        for n in range(2, 9):
            b = incompressibility_bound(n, n - 1)
            assert b.favg_bound <= 0.5 + 2 / 2**n

    def test_rejects_m_above_n(self):
        with pytest.raises(ValueError):
            incompressibility_bound(2, 3)


class TestMakeCompressor:
    @pytest.mark.parametrize("kind", ["projection", "trace_out"])
    @pytest.mark.parametrize("n,m", [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)])
    def test_bound_honored(self, kind, n, m):
        comp, decomp = make_compressor(kind, n, m)
        channel = compose(decomp, comp)
        bound = incompressibility_bound(n, m)
        assert entanglement_fidelity(channel) <= bound.fe_bound + 1e-9
        assert average_fidelity_exact(channel) <= bound.favg_bound + 1e-9

    def test_projection_two_one_value(self):
        comp, decomp = make_compressor("projection", 2, 1)
        favg = average_fidelity_exact(compose(decomp, comp))
        assert favg <= 0.6
        assert favg == pytest.approx(0.4, abs=1e-12)  # exact evaluation: (d/4+1)/(d+1)

    def test_trace_out_completeness_and_identity_on_kept(self):
        comp, decomp = make_compressor("trace_out", 3, 2)
        rho = DensityOperator.maximally_mixed(3)
        out = apply(comp, rho)
        assert np.allclose(out.matrix, np.eye(4) / 4)
        # comp equals the partial trace over the dropped qubits
        states = sample_haar_states(3, 3, SeededSampler(11))
        for row in states:
            full = PureState(row, 3).density()
            assert np.allclose(
                apply(comp, full).matrix, partial_trace(full, {0, 1}).matrix, atol=1e-12
            )

    def test_invalid_kind(self):
        with pytest.raises(ValueError, match="unknown"):
            make_compressor("squash", 2, 1)

    def test_m_not_below_n(self):
        with pytest.raises(ValueError):
            make_compressor("trace_out", 2, 2)


class TestRandomChannelBoundSweep:
    def test_random_factorable_channels_respect_bound(self):
        sampler = SeededSampler(12)
        for i, (n, m) in enumerate([(2, 1), (3, 1), (3, 2)]):
            bound = incompressibility_bound(n, m)
            for r in range(5):
                v = haar_isometry(2 ** (m + n), 2**n, sampler.at(10 * i + r))
                comp = KrausChannel.from_isometry(v, m, n, n)
                w = haar_isometry(2 ** (n + m), 2**m, sampler.at(10 * i + r + 5))
                decomp = KrausChannel.from_isometry(w, n, m, m)
                channel = compose(decomp, comp)
                assert entanglement_fidelity(channel) <= bound.fe_bound + 1e-9
                assert average_fidelity_exact(channel) <= bound.favg_bound + 1e-9
