"""Haar-random states and unitaries plus the concentration-of-measure experiment.

Randomness discipline: every draw comes from a counter-based generator keyed
by ``(seed, stream_index)``, so the same pair reproduces the same bytes no
matter how many other streams were consumed in between.  Batch helpers derive
one stream per block, which keeps sampling loops order-independent and lets
independent blocks run on any number of threads with identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .bitmix import MASK64, derive
from .states import PureState

if TYPE_CHECKING:  # pragma: no cover
    from .channels import KrausChannel

LEVY_C = 1.0 / (18.0 * math.pi**3)
#: Lipschitz constant of the channel self-fidelity map on the state sphere.
FIDELITY_LIPSCHITZ = 4.0

_BLOCK = 4096


@dataclass(frozen=True)
class SeededSampler:
    """Replayable randomness source keyed by ``(seed, stream_index)``."""

    seed: int
    stream_index: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", self.seed & MASK64)
        object.__setattr__(self, "stream_index", self.stream_index & MASK64)

    def rng(self) -> np.random.Generator:
        """Fresh generator for this exact (seed, stream_index) pair."""
        return np.random.Generator(np.random.Philox(key=(self.seed, self.stream_index)))

    def at(self, index: int) -> "SeededSampler":
        """Sampler for stream ``index`` under the same seed."""
        return replace(self, stream_index=index)

    def child(self, *tags: int | str) -> "SeededSampler":
        """Independent sampler derived by folding tags into the seed."""
        return SeededSampler(derive(self.seed, self.stream_index, *tags), 0)


def _gaussian_kets(rng: np.random.Generator, count: int, d: int) -> np.ndarray:
    raw = rng.standard_normal((count, d, 2))
    vecs = raw[..., 0] + 1j * raw[..., 1]
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    return vecs


def sample_haar_state(n: int, sampler: SeededSampler) -> PureState:
    """One Haar-random pure state on ``n`` qubits."""
    if not 1 <= n <= 12:
        raise ValueError(f"qubit count {n} outside [1, 12]")
    vec = _gaussian_kets(sampler.rng(), 1, 2**n)[0]
    return PureState(vec, n)


def sample_haar_states(n: int, count: int, sampler: SeededSampler) -> np.ndarray:
    """Matrix of ``count`` Haar states (rows), drawn block-by-block.

    Block ``b`` uses stream ``sampler.at(b)``; within a block rows follow the
    generator sequence.  The layout is deterministic in (seed, n, count).
    """
    if not 1 <= n <= 12:
        raise ValueError(f"qubit count {n} outside [1, 12]")
    if count < 1:
        raise ValueError("count must be positive")
    d = 2**n
    out = np.empty((count, d), dtype=complex)
    for block, start in enumerate(range(0, count, _BLOCK)):
        stop = min(start + _BLOCK, count)
        out[start:stop] = _gaussian_kets(sampler.at(block).rng(), stop - start, d)
    return out


def sample_haar_unitary(n: int, sampler: SeededSampler) -> np.ndarray:
    """Haar-random unitary via QR of a Ginibre matrix with phase correction.

    The raw QR factor is not Haar-distributed; multiplying column ``j`` by
    ``R_jj / |R_jj|`` removes the decomposition's phase convention and yields
    the unique factor with positive-diagonal ``R``, which is Haar.
    """
    if not 1 <= n <= 12:
        raise ValueError(f"qubit count {n} outside [1, 12]")
    d = 2**n
    rng = sampler.rng()
    raw = rng.standard_normal((d, d, 2))
    z = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def haar_isometry(rows: int, cols: int, sampler: SeededSampler) -> np.ndarray:
    """Truncation of a Haar unitary to its first ``cols`` columns."""
    if cols > rows:
        raise ValueError(f"no isometry with {rows} rows and {cols} columns")
    rng = sampler.rng()
    raw = rng.standard_normal((rows, rows, 2))
    z = (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return (q * (diag / np.abs(diag)))[:, :cols]


def levy_tail_bound(epsilon: float, r: int, lipschitz: float) -> float:
    """Concentration tail bound ``2 exp(-2 C (r+1) eps^2 / eta^2)``.

    ``r`` is the real sphere dimension (``2d - 1`` for d-dimensional complex
    pure states) and ``C = 1/(18 pi^3)``.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if lipschitz <= 0:
        raise ValueError("lipschitz constant must be positive")
    exponent = -2.0 * LEVY_C * (r + 1) * epsilon**2 / lipschitz**2
    return 2.0 * math.exp(exponent)


@dataclass(frozen=True)
class ConcentrationReport:
    """Summary of sampled channel self-fidelities against the analytic tail."""

    n: int
    samples: int
    empirical_mean: float
    empirical_std: float
    epsilons: tuple[float, ...]
    tail_frequencies: tuple[float, ...]
    levy_bounds: tuple[float, ...]

    def tail_frequency(self, epsilon: float) -> float:
        return self.tail_frequencies[self.epsilons.index(epsilon)]

    def levy_bound(self, epsilon: float) -> float:
        return self.levy_bounds[self.epsilons.index(epsilon)]

    def to_csv_rows(self) -> list[tuple]:
        return [
            (self.n, self.samples, self.empirical_mean, self.empirical_std, eps, tf, lb)
            for eps, tf, lb in zip(self.epsilons, self.tail_frequencies, self.levy_bounds)
        ]

    CSV_HEADER = ("n", "samples", "mean", "std", "epsilon", "tail_frequency", "levy_bound")


class TailBoundViolation(RuntimeError):
    """An empirical tail exceeded the analytic concentration bound."""


def concentration_report(
    f_values: np.ndarray, n: int, epsilons: Sequence[float]
) -> ConcentrationReport:
    """Summarize sampled self-fidelities and check each tail against the bound."""
    f = np.asarray(f_values, dtype=float)
    samples = f.shape[0]
    d = 2**n
    mean = float(np.mean(f))
    std = float(np.std(f, ddof=1)) if samples > 1 else 0.0
    eps_tuple = tuple(float(e) for e in epsilons)
    tails = []
    bounds = []
    for eps in eps_tuple:
        tail = float(np.mean(np.abs(f - mean) >= eps))
        bound = levy_tail_bound(eps, 2 * d - 1, FIDELITY_LIPSCHITZ)
        if tail > bound:
            raise TailBoundViolation(
                f"tail frequency {tail} at eps={eps} exceeds bound {bound}"
            )
        tails.append(tail)
        bounds.append(bound)
    return ConcentrationReport(
        n=n,
        samples=samples,
        empirical_mean=mean,
        empirical_std=std,
        epsilons=eps_tuple,
        tail_frequencies=tuple(tails),
        levy_bounds=tuple(bounds),
    )


def concentration_experiment(
    channel: "KrausChannel",
    samples: int,
    epsilons: Sequence[float],
    sampler: SeededSampler,
) -> ConcentrationReport:
    """Sample ``f(psi) = <psi|Phi(|psi><psi|)|psi>`` over Haar states.

    Reports mean, standard deviation, and per-epsilon tail frequencies
    ``Pr[|f - mean| >= eps]``, each checked against :func:`levy_tail_bound`
    with the 4-Lipschitz constant and sphere dimension ``2d - 1``.
    """
    from .channels import channel_self_fidelity_samples

    if channel.n_in != channel.n_out:
        raise ValueError("concentration experiment needs a square channel")
    f = channel_self_fidelity_samples(channel, samples, sampler)
    return concentration_report(f, channel.n_in, epsilons)
