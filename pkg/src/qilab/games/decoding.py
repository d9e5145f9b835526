"""Information-theoretic decoding oracles certifying the compression caps.

The pretty-good measurement gives a concrete decoder for any labelled state
ensemble; dimension counting caps every decoder's success at
``dim / #labels``.  Both are exposed so experiments can measure a success
rate and check it against the cap without trusting the role under test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence, Union

import numpy as np

from ..states import DensityOperator, PureState

EnsembleState = Union[DensityOperator, PureState]


class DecodingCapViolation(RuntimeError):
    """A measured recovery success exceeded the dimension-counting cap."""


@dataclass(frozen=True)
class Ensemble:
    """Labelled states with prior probabilities on one common dimension.

    Pure states stay vectors internally; the pretty-good measurement has a
    vectorized path for them that never forms a density matrix.
    """

    labels: tuple[Hashable, ...]
    states: tuple[EnsembleState, ...]
    priors: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("ensemble must not be empty")
        if not len(self.labels) == len(self.states) == len(self.priors):
            raise ValueError("labels, states, priors must have equal length")
        dim = self.states[0].d
        if any(st.d != dim for st in self.states):
            raise ValueError("ensemble states live on different dimensions")
        if any(p < -1e-12 for p in self.priors):
            raise ValueError("priors must be nonnegative")
        if abs(sum(self.priors) - 1.0) > 1e-9:
            raise ValueError("priors must sum to 1")

    @property
    def dim(self) -> int:
        return self.states[0].d

    @classmethod
    def uniform(cls, labels: Sequence[Hashable], states: Sequence[EnsembleState]) -> "Ensemble":
        count = len(states)
        return cls(tuple(labels), tuple(states), tuple(1.0 / count for _ in range(count)))


def guessing_upper_bound(messages: int, dim: int) -> float:
    """Dimension-counting cap ``min(1, K/N)`` on identifying one of ``N`` messages."""
    if messages < 1 or dim < 1:
        raise ValueError("messages and dim must be positive")
    return min(1.0, dim / messages)


def _inv_root_on_support(s: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(s)
    support = eigvals > 1e-12
    return (eigvecs[:, support] * (eigvals[support] ** -0.5)) @ eigvecs[:, support].conj().T


def pgm_success(ensemble: Ensemble) -> float:
    """Success probability of the pretty-good measurement on the ensemble.

    POVM elements are ``p_i S^{-1/2} rho_i S^{-1/2}`` on the support of
    ``S = sum_i p_i rho_i``; any weight outside the support counts as failure.
    """
    dim = ensemble.dim
    priors = np.asarray(ensemble.priors)
    if all(isinstance(st, PureState) for st in ensemble.states):
        kets = np.stack([st.amplitudes for st in ensemble.states])  # (N, d)
        s = np.einsum("i,id,ie->de", priors, kets, kets.conj(), optimize=True)
        inv_root = _inv_root_on_support(s)
        amps = np.einsum("id,de,ie->i", kets.conj(), inv_root, kets, optimize=True)
        success = float(np.sum(priors**2 * np.abs(amps) ** 2))
    else:
        mats = [
            st.density().matrix if isinstance(st, PureState) else st.matrix
            for st in ensemble.states
        ]
        s = np.zeros((dim, dim), dtype=complex)
        for mat, p in zip(mats, priors):
            s += p * mat
        inv_root = _inv_root_on_support(s)
        success = 0.0
        for mat, p in zip(mats, priors):
            half = inv_root @ mat @ inv_root
            success += float(p) ** 2 * float(np.real(np.trace(half @ mat)))
    success = float(min(max(success, 0.0), 1.0))
    cap = guessing_upper_bound(len(ensemble.labels), dim)
    if success > cap + 1e-9:
        raise DecodingCapViolation(
            f"PGM success {success} exceeds dimension cap {cap}; the measurement is broken"
        )
    return success


def min_qubits_to_convey(n_bits: int, success_prob: float) -> float:
    """Lower bound ``(n - log2(1/p)) / 2`` on qubits needed to convey ``n`` bits.

    The bound holds for any interactive protocol, whatever entanglement is
    shared in advance; callers assert their channel widths against it.  For
    tiny ``p`` the bound drops below zero and is vacuous.
    """
    if not 0.0 < success_prob <= 1.0:
        raise ValueError("success probability must be in (0, 1]")
    return 0.5 * (n_bits - math.log2(1.0 / success_prob))
