"""Dense complex states on up to 12 qubits plus the distance/fidelity toolkit.

Conventions (fixed across the whole package):

- kets are column vectors stored as 1-D complex arrays;
- qubit 0 is the most significant tensor factor, so basis index
  ``x = b_0 b_1 ... b_{n-1}`` in binary with ``b_0`` the top bit;
- matrices are dense row-major complex;
- fidelity uses the squared convention ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``,
  so for a pure state ``F(|psi><psi|, sigma) = <psi|sigma|psi>``.

All values are immutable after construction and every operation is a pure
function, so everything here is safe to call from multiple threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

MAX_QUBITS = 12
ATOL = 1e-9
EIG_CLIP = 1e-12


def _check_qubit_count(n: int) -> None:
    if not 0 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside supported range [0, {MAX_QUBITS}]")


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PureState:
    """Unit vector on ``n`` qubits (dimension ``2**n``)."""

    amplitudes: np.ndarray
    n: int

    def __post_init__(self) -> None:
        _check_qubit_count(self.n)
        amps = _frozen(np.asarray(self.amplitudes).reshape(-1))
        if amps.shape[0] != 2**self.n:
            raise ValueError(
                f"amplitude vector has length {amps.shape[0]}, expected {2**self.n}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state norm {norm} deviates from 1 beyond {ATOL}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d(self) -> int:
        return 2**self.n

    @classmethod
    def from_vector(cls, vec: np.ndarray) -> "PureState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        n = int(round(np.log2(vec.shape[0])))
        if 2**n != vec.shape[0]:
            raise ValueError(f"dimension {vec.shape[0]} is not a power of two")
        return cls(vec, n)

    @classmethod
    def basis(cls, n: int, index: int) -> "PureState":
        if not 0 <= index < 2**n:
            raise ValueError(f"basis index {index} out of range for {n} qubits")
        vec = np.zeros(2**n, dtype=complex)
        vec[index] = 1.0
        return cls(vec, n)

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.n)

    def overlap(self, other: "PureState") -> complex:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PureState":
        vec = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return cls(vec, int(obj["n"]))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive-semidefinite, trace-one matrix on ``n`` qubits."""

    matrix: np.ndarray
    n: int

    def __post_init__(self) -> None:
        _check_qubit_count(self.n)
        mat = _frozen(np.asarray(self.matrix))
        d = 2**self.n
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match dimension {d}")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        tr = np.trace(mat)
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"trace {tr} deviates from 1 beyond {ATOL}")
        eigs = np.linalg.eigvalsh(mat)
        eigs = np.where(np.abs(eigs) < EIG_CLIP, 0.0, eigs)
        if eigs.min() < -ATOL:
            raise ValueError(f"matrix has negative eigenvalue {eigs.min()}")
        object.__setattr__(self, "matrix", mat)

    @property
    def d(self) -> int:
        return 2**self.n

    @classmethod
    def maximally_mixed(cls, n: int) -> "DensityOperator":
        d = 2**n
        return cls(np.eye(d, dtype=complex) / d, n)

    def to_json(self) -> dict:
        flat = self.matrix.reshape(-1)
        return {"n": self.n, "re": flat.real.tolist(), "im": flat.imag.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "DensityOperator":
        n = int(obj["n"])
        d = 2**n
        flat = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
        return cls(flat.reshape(d, d), n)


@dataclass(frozen=True)
class Projector:
    """Hermitian idempotent matrix; the binary-outcome measurement element."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        mat = _frozen(np.asarray(self.matrix))
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("projector must be a square matrix")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL:
            raise ValueError("projector is not Hermitian within tolerance")
        if np.max(np.abs(mat @ mat - mat)) > ATOL:
            raise ValueError("projector is not idempotent within tolerance")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def onto(cls, vectors: Iterable[np.ndarray]) -> "Projector":
        """Projector onto the span of the given (orthonormalized) vectors."""
        cols = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
        q, _ = np.linalg.qr(cols)
        return cls(q @ q.conj().T)

    @classmethod
    def identity(cls, d: int) -> "Projector":
        return cls(np.eye(d, dtype=complex))


def tensor_product(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    """Kronecker product of two density operators; qubit indices of ``b`` follow ``a``."""
    n_total = a.n + b.n
    if n_total > MAX_QUBITS:
        raise ValueError(
            f"tensor product would need {n_total} qubits, cap is {MAX_QUBITS}"
        )
    return DensityOperator(np.kron(a.matrix, b.matrix), n_total)


def partial_trace(rho: DensityOperator, keep: Iterable[int]) -> DensityOperator:
    """Trace out every qubit not listed in ``keep``.

    Kept qubits appear in the result in ascending original index order.
    """
    keep_list = sorted(set(int(q) for q in keep))
    if not keep_list:
        raise ValueError("keep set must not be empty")
    if keep_list[0] < 0 or keep_list[-1] >= rho.n:
        raise ValueError(f"keep indices {keep_list} out of range for {rho.n} qubits")
    n = rho.n
    tensor = rho.matrix.reshape((2,) * (2 * n))
    # Row axes are 0..n-1, column axes n..2n-1; contract each dropped qubit.
    dropped = [q for q in range(n) if q not in keep_list]
    for offset, q in enumerate(dropped):
        ax = q - offset  # axes shift left after each trace
        tensor = np.trace(tensor, axis1=ax, axis2=ax + (n - offset))
    m = len(keep_list)
    return DensityOperator(tensor.reshape(2**m, 2**m), m)


def psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Matrix square root of a numerically PSD Hermitian matrix.

    Eigenvalues below the clipping floor are treated as exact zeros, so tiny
    negative noise never reaches the square root.
    """
    eigvals, eigvecs = np.linalg.eigh(mat)
    eigvals = np.where(eigvals < EIG_CLIP, 0.0, eigvals)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Squared-convention fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2``."""
    if rho.n != sigma.n:
        raise ValueError("dimension mismatch")
    root = psd_sqrt(rho.matrix)
    inner = psd_sqrt(root @ sigma.matrix @ root)
    val = float(np.real(np.trace(inner))) ** 2
    return float(min(max(val, 0.0), 1.0))


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the trace norm of the difference."""
    if rho.n != sigma.n:
        raise ValueError("dimension mismatch")
    eigs = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return float(0.5 * np.sum(np.abs(eigs)))


def gentle_measurement(
    rho: DensityOperator, pi: Projector
) -> tuple[float, DensityOperator]:
    """Post-select ``rho`` on the projector outcome.

    Returns ``(prob, post)`` with ``prob = Tr(pi rho)`` and
    ``post = pi rho pi / prob``.  The output always satisfies
    ``trace_distance(post, rho) <= 2 sqrt(1 - prob)``.
    """
    if pi.matrix.shape != rho.matrix.shape:
        raise ValueError("projector dimension mismatch")
    prob = float(np.real(np.trace(pi.matrix @ rho.matrix)))
    prob = min(prob, 1.0)  # roundoff can push Tr(pi rho) past 1 by ~1e-15
    if prob <= ATOL:
        raise ValueError("post-selection probability is zero")
    post = pi.matrix @ rho.matrix @ pi.matrix / prob
    post = 0.5 * (post + post.conj().T)  # scrub numerical anti-Hermitian dust
    return prob, DensityOperator(post, rho.n)
