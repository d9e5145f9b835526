"""Keyed binary-phase state family, the swap test, and the compression distinguisher.

The family is a toy stand-in with no security claim: phases come from a
public 64-bit mixing function, so every state is reproducible bit-for-bit
from its key.  What matters for the experiments is only that (a) generation
is deterministic per key and (b) the phase pattern is balanced enough that
distinct keys give near-orthogonal states at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitmix import GOLDEN64, MASK64, mix64, mix64_array
from .channels import KrausChannel, compose, state_self_fidelities
from .haar import SeededSampler, sample_haar_states
from .states import DensityOperator, PureState


@dataclass(frozen=True)
class PrsKey:
    """Classical key; only the low ``lam`` bits are significant."""

    bits: int
    lam: int

    def __post_init__(self) -> None:
        if not 1 <= self.lam <= 64:
            raise ValueError(f"key length {self.lam} outside [1, 64]")
        object.__setattr__(self, "bits", self.bits & ((1 << self.lam) - 1))


@dataclass(frozen=True)
class PrsFamily:
    """Deterministic keyed family of flat-magnitude phase states on ``n`` qubits."""

    lam: int
    n: int

    def __post_init__(self) -> None:
        if not 1 <= self.lam <= 64:
            raise ValueError(f"key length {self.lam} outside [1, 64]")
        if not 1 <= self.n <= 12:
            raise ValueError(f"qubit count {self.n} outside [1, 12]")

    @property
    def key_count(self) -> int:
        return 1 << self.lam

    def key(self, bits: int) -> PrsKey:
        return PrsKey(bits, self.lam)

    def state(self, key: PrsKey) -> PureState:
        return prs_gen(self, key)

    def all_states(self) -> list[PureState]:
        """Every family state; only sensible for small key spaces."""
        if self.lam > 12:
            raise ValueError(f"refusing to enumerate 2^{self.lam} keys")
        return [prs_gen(self, self.key(k)) for k in range(self.key_count)]

    def random_key(self, rng: np.random.Generator) -> PrsKey:
        high = int(rng.integers(0, 1 << 32))
        low = int(rng.integers(0, 1 << 32))
        return self.key(((high << 32) | low) & MASK64)


def prf_bit(key: PrsKey, x: int, n: int) -> int:
    """Phase bit at input ``x``: LSB of ``mix64(key XOR (x * golden))``."""
    if not 0 <= x < (1 << n):
        raise ValueError(f"input {x} outside [0, 2^{n})")
    return mix64(key.bits ^ ((x * GOLDEN64) & MASK64)) & 1


def _phase_bits(key: PrsKey, n: int) -> np.ndarray:
    xs = np.arange(1 << n, dtype=np.uint64)
    mixed = mix64_array((xs * np.uint64(GOLDEN64)) ^ np.uint64(key.bits))
    return (mixed & np.uint64(1)).astype(np.int64)


def state_from_phase_bits(bits: np.ndarray) -> PureState:
    """Uniform-magnitude state ``2^{-n/2} sum_x (-1)^{bits[x]} |x>``."""
    bits = np.asarray(bits, dtype=np.int64).reshape(-1)
    d = bits.shape[0]
    n = int(round(math.log2(d)))
    if 2**n != d:
        raise ValueError(f"phase table length {d} is not a power of two")
    amps = ((-1.0) ** bits) / math.sqrt(d)
    return PureState(amps.astype(complex), n)


def prs_gen(family: PrsFamily, key: PrsKey) -> PureState:
    """Generate the family state for ``key``."""
    if key.lam != family.lam:
        raise ValueError(f"key length {key.lam} does not match family length {family.lam}")
    return state_from_phase_bits(_phase_bits(key, family.n))


def _overlap(rho: DensityOperator, sigma: DensityOperator) -> float:
    if rho.n != sigma.n:
        raise ValueError("dimension mismatch")
    return float(np.real(np.trace(rho.matrix @ sigma.matrix)))


def swap_test_accept_prob(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Acceptance probability ``(1 + Tr(rho sigma)) / 2``."""
    val = 0.5 * (1.0 + _overlap(rho, sigma))
    return float(min(max(val, 0.5), 1.0))


def swap_test_sample(
    rho: DensityOperator, sigma: DensityOperator, sampler: SeededSampler
) -> int:
    """One Bernoulli draw of the swap-test outcome (1 = accept)."""
    p = swap_test_accept_prob(rho, sigma)
    return int(sampler.rng().random() < p)


@dataclass(frozen=True)
class DistinguisherResult:
    """Measured quantities of one keyed-vs-Haar distinguishing run."""

    win_prob: float
    f_prs: float
    f_haar: float
    win_stderr: float
    f_prs_stderr: float
    f_haar_stderr: float
    trials: int
    n: int
    m: int
    lam: int

    @property
    def predicted_win(self) -> float:
        """Closed-form win probability implied by the measured fidelities."""
        return 0.5 + (self.f_prs - self.f_haar) / 4.0

    CSV_HEADER = ("n", "m", "lambda", "trials", "f_prs", "f_haar", "win_prob", "stderr")

    def to_csv_row(self) -> tuple:
        return (self.n, self.m, self.lam, self.trials, self.f_prs, self.f_haar,
                self.win_prob, self.win_stderr)


def distinguisher_advantage(
    pair: tuple[KrausChannel, KrausChannel],
    family: PrsFamily,
    trials: int,
    sampler: SeededSampler,
) -> DistinguisherResult:
    """Play the compress/decompress swap-test game against the family.

    One branch feeds fresh family states (random keys), the other fresh Haar
    states.  Fidelities are recorded exactly (the harness knows each input
    state); the sampled swap test is kept as the win-probability path, scored
    as ``(accept on keyed)/2 + (reject on Haar)/2`` per trial.
    """
    comp, decomp = pair
    if comp.n_in != family.n or decomp.n_out != family.n:
        raise ValueError("channel pair does not act on the family's qubit count")
    if trials < 2:
        raise ValueError("need at least 2 trials")
    channel = compose(decomp, comp)

    key_rng = sampler.child("keys").rng()
    keyed_states = np.stack(
        [prs_gen(family, family.random_key(key_rng)).amplitudes for _ in range(trials)]
    )
    haar_states = sample_haar_states(family.n, trials, sampler.child("haar"))

    f_prs_vals = state_self_fidelities(channel, keyed_states)
    f_haar_vals = state_self_fidelities(channel, haar_states)

    swap_rng = sampler.child("swap").rng()
    accept_prs = swap_rng.random(trials) < 0.5 * (1.0 + f_prs_vals)
    accept_haar = swap_rng.random(trials) < 0.5 * (1.0 + f_haar_vals)
    wins = 0.5 * accept_prs + 0.5 * (1.0 - accept_haar)

    def mean_stderr(vals: np.ndarray) -> tuple[float, float]:
        return float(np.mean(vals)), float(np.std(vals, ddof=1) / math.sqrt(trials))

    win_prob, win_stderr = mean_stderr(wins)
    f_prs, f_prs_stderr = mean_stderr(f_prs_vals)
    f_haar, f_haar_stderr = mean_stderr(f_haar_vals)
    return DistinguisherResult(
        win_prob=win_prob,
        f_prs=f_prs,
        f_haar=f_haar,
        win_stderr=win_stderr,
        f_prs_stderr=f_prs_stderr,
        f_haar_stderr=f_haar_stderr,
        trials=trials,
        n=family.n,
        m=comp.n_out,
        lam=family.lam,
    )
