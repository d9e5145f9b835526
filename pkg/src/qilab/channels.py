"""CPTP channels as Kraus-operator lists, fidelity machinery, and compressors.

Two independent computation paths exist for the entanglement fidelity: the
Kraus trace sum and the inner product against the maximally entangled state.
They must agree to 1e-9; the test suite treats disagreement as a hard failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .haar import SeededSampler, sample_haar_states
from .states import ATOL, EIG_CLIP, MAX_QUBITS, DensityOperator, PureState

if TYPE_CHECKING:  # pragma: no cover
    from .prs import PrsFamily

COMPRESSOR_KINDS = ("projection", "trace_out", "keyed")


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map ``rho -> sum_i K_i rho K_i^dag`` with complete Kraus list."""

    kraus_ops: tuple[np.ndarray, ...]
    n_in: int
    n_out: int

    def __post_init__(self) -> None:
        if not 0 <= self.n_in <= MAX_QUBITS or not 0 <= self.n_out <= MAX_QUBITS:
            raise ValueError("qubit counts outside supported range")
        ops = tuple(np.array(k, dtype=complex) for k in self.kraus_ops)
        if not ops:
            raise ValueError("channel needs at least one Kraus operator")
        shape = (2**self.n_out, 2**self.n_in)
        for k in ops:
            if k.shape != shape:
                raise ValueError(f"Kraus operator shape {k.shape}, expected {shape}")
            k.setflags(write=False)
        total = sum(k.conj().T @ k for k in ops)
        if np.max(np.abs(total - np.eye(2**self.n_in))) > ATOL:
            raise ValueError("Kraus operators do not satisfy completeness")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def d_in(self) -> int:
        return 2**self.n_in

    @property
    def d_out(self) -> int:
        return 2**self.n_out

    @classmethod
    def identity(cls, n: int) -> "KrausChannel":
        return cls((np.eye(2**n, dtype=complex),), n, n)

    @classmethod
    def computational_measurement(cls, n: int) -> "KrausChannel":
        d = 2**n
        ops = []
        for i in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[i, i] = 1.0
            ops.append(k)
        return cls(tuple(ops), n, n)

    @classmethod
    def completely_depolarizing(cls, n: int) -> "KrausChannel":
        """The replacement channel ``rho -> I/d``."""
        d = 2**n
        ops = []
        for i in range(d):
            for j in range(d):
                k = np.zeros((d, d), dtype=complex)
                k[i, j] = 1.0 / np.sqrt(d)
                ops.append(k)
        return cls(tuple(ops), n, n)

    @classmethod
    def reset_to_basis(cls, n: int, index: int = 0) -> "KrausChannel":
        """Measure-and-reprepare onto one fixed basis state."""
        d = 2**n
        ops = []
        for i in range(d):
            k = np.zeros((d, d), dtype=complex)
            k[index, i] = 1.0
            ops.append(k)
        return cls(tuple(ops), n, n)

    @classmethod
    def from_isometry(cls, v: np.ndarray, n_out: int, env_qubits: int, n_in: int) -> "KrausChannel":
        """Channel obtained by applying isometry ``v`` and tracing the environment.

        ``v`` maps ``2**n_in -> 2**n_out (x) 2**env_qubits`` with system-major
        row ordering (row index = sys * 2**env_qubits + env).
        """
        d_out, d_env, d_in = 2**n_out, 2**env_qubits, 2**n_in
        v = np.asarray(v, dtype=complex)
        if v.shape != (d_out * d_env, d_in):
            raise ValueError(f"isometry shape {v.shape}, expected {(d_out * d_env, d_in)}")
        v3 = v.reshape(d_out, d_env, d_in)
        return cls(tuple(v3[:, e, :] for e in range(d_env)), n_in, n_out)

    def to_json(self) -> dict:
        return {
            "n_in": self.n_in,
            "n_out": self.n_out,
            "kraus": [
                {"re": k.real.reshape(-1).tolist(), "im": k.imag.reshape(-1).tolist()}
                for k in self.kraus_ops
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "KrausChannel":
        n_in, n_out = int(obj["n_in"]), int(obj["n_out"])
        shape = (2**n_out, 2**n_in)
        ops = []
        for item in obj["kraus"]:
            flat = np.asarray(item["re"], dtype=float) + 1j * np.asarray(item["im"], dtype=float)
            ops.append(flat.reshape(shape))
        return cls(tuple(ops), n_in, n_out)


def apply(channel: KrausChannel, rho: DensityOperator) -> DensityOperator:
    """Apply the channel to a density operator."""
    if rho.n != channel.n_in:
        raise ValueError(f"state on {rho.n} qubits, channel expects {channel.n_in}")
    out = np.zeros((channel.d_out, channel.d_out), dtype=complex)
    for k in channel.kraus_ops:
        out += k @ rho.matrix @ k.conj().T
    out = 0.5 * (out + out.conj().T)
    return DensityOperator(out, channel.n_out)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel ``second o first``; the Kraus list is the pairwise product set."""
    if first.n_out != second.n_in:
        raise ValueError(
            f"cannot compose: first outputs {first.n_out} qubits, second expects {second.n_in}"
        )
    ops = tuple(b @ a for a in first.kraus_ops for b in second.kraus_ops)
    return KrausChannel(ops, first.n_in, second.n_out)


def state_self_fidelities(channel: KrausChannel, states: np.ndarray) -> np.ndarray:
    """Vector of ``<psi|Phi(|psi><psi|)|psi>`` for each row of ``states``.

    Uses ``f(psi) = sum_i |<psi|K_i|psi>|^2``, which avoids forming any
    density matrix.
    """
    if channel.n_in != channel.n_out:
        raise ValueError("self-fidelity needs a square channel")
    states = np.asarray(states, dtype=complex)
    f = np.zeros(states.shape[0], dtype=float)
    for k in channel.kraus_ops:
        amps = np.einsum("sd,de,se->s", states.conj(), k, states, optimize=True)
        f += np.abs(amps) ** 2
    return f


def channel_self_fidelity_samples(
    channel: KrausChannel, count: int, sampler: SeededSampler
) -> np.ndarray:
    """Self-fidelities over ``count`` Haar states, generated block by block.

    Streams match :func:`qilab.haar.sample_haar_states` (block ``b`` draws
    from ``sampler.at(b)``), but only one block of states is ever resident,
    so large sample counts at 10+ qubits stay within memory.
    """
    from .haar import _BLOCK, _gaussian_kets

    if channel.n_in != channel.n_out:
        raise ValueError("self-fidelity needs a square channel")
    if count < 1:
        raise ValueError("count must be positive")
    d = channel.d_in
    f = np.empty(count, dtype=float)
    for block, start in enumerate(range(0, count, _BLOCK)):
        stop = min(start + _BLOCK, count)
        states = _gaussian_kets(sampler.at(block).rng(), stop - start, d)
        f[start:stop] = state_self_fidelities(channel, states)
    return f


def entanglement_fidelity(channel: KrausChannel) -> float:
    """Closed form ``(1/d^2) sum_i |Tr K_i|^2``."""
    if channel.n_in != channel.n_out:
        raise ValueError("entanglement fidelity needs a square channel")
    d = channel.d_in
    total = sum(abs(np.trace(k)) ** 2 for k in channel.kraus_ops)
    return float(total) / d**2


def entanglement_fidelity_choi(channel: KrausChannel) -> float:
    """Independent path: build the Choi state and take its overlap.

    Constructs the full density matrix ``(I (x) Phi)(|phi+><phi+|)`` by
    applying the lifted channel, then evaluates ``<phi+| . |phi+>``.  This
    shares no algebra with the trace-sum formula, so the two serve as mutual
    cross-checks.
    """
    if channel.n_in != channel.n_out:
        raise ValueError("entanglement fidelity needs a square channel")
    n, d = channel.n_in, channel.d_in
    phi = np.zeros(d * d, dtype=complex)
    phi[:: d + 1] = 1.0 / np.sqrt(d)  # (1/sqrt(d)) sum_i |i>|i>
    eye = np.eye(d, dtype=complex)
    lifted = KrausChannel(
        tuple(np.kron(eye, k) for k in channel.kraus_ops), 2 * n, 2 * n
    )
    choi_state = apply(lifted, PureState(phi, 2 * n).density())
    return float(np.real(np.vdot(phi, choi_state.matrix @ phi)))


def average_fidelity_exact(channel: KrausChannel) -> float:
    """Haar-average self-fidelity via ``(d F_E + 1) / (d + 1)``."""
    d = channel.d_in
    return (d * entanglement_fidelity(channel) + 1.0) / (d + 1.0)


def average_fidelity_mc(
    channel: KrausChannel, samples: int, sampler: SeededSampler
) -> tuple[float, float]:
    """Monte-Carlo estimate of the average self-fidelity: ``(mean, stderr)``."""
    if samples < 2:
        raise ValueError("need at least 2 samples")
    f = channel_self_fidelity_samples(channel, samples, sampler)
    mean = float(np.mean(f))
    stderr = float(np.std(f, ddof=1) / np.sqrt(samples))
    return mean, stderr


@dataclass(frozen=True)
class FidelityBound:
    """Ceilings for any channel factoring through ``2**m`` dimensions."""

    n: int
    m: int
    fe_bound: float
    favg_bound: float

    def __post_init__(self) -> None:
        if not 0.0 < self.fe_bound <= 1.0:
            raise ValueError("fe_bound outside (0, 1]")
        if self.m < self.n and not self.fe_bound < self.favg_bound <= 1.0:
            raise ValueError("expected fe_bound < favg_bound <= 1 for m < n")


def incompressibility_bound(n: int, m: int) -> FidelityBound:
    """Fidelity ceilings ``F_E <= 2^(m-n)`` and ``F_avg <= (2^m+1)/(2^n+1)``."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return FidelityBound(
        n=n,
        m=m,
        fe_bound=2.0 ** (m - n),
        favg_bound=(2**m + 1) / (2**n + 1),
    )


def _embedding(d_small: int, d_big: int) -> np.ndarray:
    """The ``d_small x d_big`` map keeping the first ``d_small`` basis states."""
    e = np.zeros((d_small, d_big), dtype=complex)
    e[:, :d_small] = np.eye(d_small)
    return e


def _projection_pair(n: int, m: int) -> tuple[KrausChannel, KrausChannel]:
    d, k = 2**n, 2**m
    keep = _embedding(k, d)
    comp_ops = [keep]
    # Route the orthogonal complement to one fixed state to restore completeness.
    for j in range(k, d):
        op = np.zeros((k, d), dtype=complex)
        op[0, j] = 1.0
        comp_ops.append(op)
    comp = KrausChannel(tuple(comp_ops), n, m)
    decomp = KrausChannel((keep.conj().T,), m, n)
    return comp, decomp


def _trace_out_pair(n: int, m: int) -> tuple[KrausChannel, KrausChannel]:
    d_keep, d_drop = 2**m, 2 ** (n - m)
    comp_ops = []
    for b in range(d_drop):
        bra = np.zeros((1, d_drop), dtype=complex)
        bra[0, b] = 1.0
        comp_ops.append(np.kron(np.eye(d_keep, dtype=complex), bra))
    comp = KrausChannel(tuple(comp_ops), n, m)
    ket0 = np.zeros((d_drop, 1), dtype=complex)
    ket0[0, 0] = 1.0
    decomp = KrausChannel((np.kron(np.eye(d_keep, dtype=complex), ket0),), m, n)
    return comp, decomp


def _keyed_pair(n: int, m: int, family: "PrsFamily") -> tuple[KrausChannel, KrausChannel]:
    """Discriminate-then-label compressor for a small keyed state family.

    Compression measures the pretty-good measurement for the family ensemble
    and stores the winning key label; decompression reprepares the labelled
    family state.
    """
    d, k = 2**n, 2**m
    if family.n != n:
        raise ValueError(f"family states on {family.n} qubits, compressor expects {n}")
    kets = [st.amplitudes for st in family.all_states()]
    count = len(kets)
    if count > k:
        raise ValueError(f"key space of size {count} exceeds label capacity {k}")
    gram_sum = np.zeros((d, d), dtype=complex)
    for v in kets:
        gram_sum += np.outer(v, v.conj())
    eigvals, eigvecs = np.linalg.eigh(gram_sum)
    support = eigvals > 1e-10
    inv_root = (eigvecs[:, support] * (eigvals[support] ** -0.5)) @ eigvecs[:, support].conj().T
    comp_ops = []
    for idx, v in enumerate(kets):
        op = np.zeros((k, d), dtype=complex)
        op[idx, :] = v.conj() @ inv_root
        comp_ops.append(op)
    # Complement of the family span maps to label 0.
    for col in np.flatnonzero(~support):
        op = np.zeros((k, d), dtype=complex)
        op[0, :] = eigvecs[:, col].conj()
        comp_ops.append(op)
    comp = KrausChannel(tuple(comp_ops), n, m)
    decomp_ops = []
    for j in range(k):
        ket = kets[j] if j < count else kets[0]
        op = np.zeros((d, k), dtype=complex)
        op[:, j] = ket
        decomp_ops.append(op)
    decomp = KrausChannel(tuple(decomp_ops), m, n)
    return comp, decomp


def make_compressor(
    kind: str,
    n: int,
    m: int,
    extra: "PrsFamily | None" = None,
) -> tuple[KrausChannel, KrausChannel]:
    """Built-in compress/decompress channel pairs ``2**n -> 2**m -> 2**n``."""
    if kind not in COMPRESSOR_KINDS:
        raise ValueError(f"unknown compressor kind {kind!r}; choose from {COMPRESSOR_KINDS}")
    if not 1 <= m < n <= MAX_QUBITS:
        raise ValueError(f"need 1 <= m < n <= {MAX_QUBITS}, got m={m}, n={n}")
    if kind == "projection":
        return _projection_pair(n, m)
    if kind == "trace_out":
        return _trace_out_pair(n, m)
    if extra is None:
        raise ValueError("keyed compressor needs a state family")
    return _keyed_pair(n, m, extra)
