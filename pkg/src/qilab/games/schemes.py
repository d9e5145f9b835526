"""Toy encryption schemes: correct, size-bounded, and deliberately breakable.

The attack harnesses need correctness only; nothing here hides anything.
The functional-encryption toy encrypts by applying a seed-derived basis
permutation (a fixed unitary that never has to be materialized), so message
registers of any bit width stay cheap.  The public-key toy XORs with a
keystream derived from the *public* tag, which is the advertised weakness
the CPA experiments exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..bitmix import MASK64, derive, mix64
from ..haar import SeededSampler
from ..prs import PrsFamily, prs_gen
from ..states import PureState


@dataclass(frozen=True)
class Circuit:
    """Structured circuit identifier interpreted by the harness."""

    kind: str
    params: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "pke-enc", "prs-gen"):
            raise ValueError(f"unknown circuit kind {self.kind!r}")

    def identifier(self) -> str:
        return ":".join([self.kind, *map(str, self.params)])


IDENTITY_CIRCUIT = Circuit("identity")


def pke_enc_circuit(pk: int) -> Circuit:
    return Circuit("pke-enc", (pk,))


def prs_gen_circuit(lam: int, n: int) -> Circuit:
    return Circuit("prs-gen", (lam, n))


@dataclass(frozen=True)
class ClassicalMessage:
    """Classical bit string carried through the quantum interfaces."""

    value: int
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.value < (1 << self.bits):
            raise ValueError(f"value {self.value} does not fit in {self.bits} bits")


Message = Union[ClassicalMessage, PureState]


def message_qubits(message: Message) -> int:
    return message.bits if isinstance(message, ClassicalMessage) else message.n


# --------------------------------------------------------------------------
# Toy public-key encryption
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PkeCiphertext:
    nonce: int
    masked: int


@dataclass(frozen=True)
class ToyPke:
    """Keystream XOR under a public tag; correct and trivially breakable."""

    msg_bits: int = 16

    def gen(self, sampler: SeededSampler) -> tuple[int, int]:
        """Sample ``(sk, pk)``; the public key is a mix of the secret seed."""
        rng = sampler.rng()
        sk = int(rng.integers(0, 1 << 62)) & MASK64
        return sk, mix64(sk)

    def _stream(self, pk: int, nonce: int) -> int:
        return derive(pk, "pke-stream", nonce) & ((1 << self.msg_bits) - 1)

    def enc(self, pk: int, m: int, sampler: SeededSampler) -> PkeCiphertext:
        if not 0 <= m < (1 << self.msg_bits):
            raise ValueError(f"message {m} does not fit in {self.msg_bits} bits")
        nonce = int(sampler.rng().integers(0, 1 << 62))
        return PkeCiphertext(nonce, m ^ self._stream(pk, nonce))

    def dec(self, sk: int, ct: PkeCiphertext) -> int:
        return ct.masked ^ self._stream(mix64(sk), ct.nonce)

    def break_with_public_key(self, pk: int, ct: PkeCiphertext) -> int:
        """The advertised weakness: decryption from public data alone."""
        return ct.masked ^ self._stream(pk, ct.nonce)


# --------------------------------------------------------------------------
# Toy quantum functional encryption
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FunctionalKey:
    master_seed: int
    circuit: Circuit


@dataclass(frozen=True)
class QfeCiphertext:
    """Ciphertext register; basis payloads stay symbolic above 12 qubits."""

    payload: Union[int, PureState]
    n: int

    @property
    def qubits(self) -> int:
        return self.n


@dataclass(frozen=True)
class GameContext:
    """Ambient machinery circuit evaluation may need."""

    pke: ToyPke | None = None
    sampler: SeededSampler | None = None


def evaluate_circuit(circuit: Circuit, message: Message, context: GameContext) -> object:
    """Run a harness circuit on a message."""
    if circuit.kind == "identity":
        return message
    if not isinstance(message, ClassicalMessage):
        raise ValueError(f"circuit {circuit.kind} needs a classical message")
    if circuit.kind == "pke-enc":
        if context.pke is None or context.sampler is None:
            raise ValueError("pke-enc circuit needs a PKE scheme and randomness")
        (pk,) = circuit.params
        return context.pke.enc(pk, message.value, context.sampler)
    lam, n = circuit.params
    family = PrsFamily(lam=lam, n=n)
    return prs_gen(family, family.key(message.value))


@dataclass(frozen=True)
class ToyQfe:
    """Functional encryption via a seed-derived basis permutation.

    ``enc`` applies the permutation ``x -> ((x ^ r1) * mult) ^ r2`` modulo the
    register size (``mult`` odd, hence invertible); ``dec`` inverts it and
    evaluates the keyed circuit.  Decryption is reversible-then-readout, so
    the functional key survives reuse across many ciphertexts unchanged.
    """

    lam: int = 16
    fk_qubit_bound: int = 64  # classical seed bits, counted as qubits

    def setup(self, sampler: SeededSampler) -> int:
        return int(sampler.rng().integers(0, 1 << 62)) & MASK64

    def keygen(self, mk: int, circuit: Circuit) -> FunctionalKey:
        return FunctionalKey(mk, circuit)

    def _perm_params(self, mk: int, bits: int) -> tuple[int, int, int]:
        r1 = derive(mk, "perm-r1", bits)
        r2 = derive(mk, "perm-r2", bits)
        mult = derive(mk, "perm-mult", bits) | 1  # odd, invertible mod 2**bits
        mask = (1 << bits) - 1
        return r1 & mask, r2 & mask, mult & mask

    def _permute(self, mk: int, bits: int, x: int) -> int:
        r1, r2, mult = self._perm_params(mk, bits)
        mask = (1 << bits) - 1
        return (((x ^ r1) * mult) & mask) ^ r2

    def _unpermute(self, mk: int, bits: int, y: int) -> int:
        r1, r2, mult = self._perm_params(mk, bits)
        mask = (1 << bits) - 1
        inv = pow(mult, -1, 1 << bits)
        return (((y ^ r2) * inv) & mask) ^ r1

    def enc(self, mk: int, message: Message) -> QfeCiphertext:
        if isinstance(message, ClassicalMessage):
            return QfeCiphertext(self._permute(mk, message.bits, message.value), message.bits)
        perm = np.array(
            [self._permute(mk, message.n, x) for x in range(message.d)], dtype=np.int64
        )
        out = np.zeros(message.d, dtype=complex)
        out[perm] = message.amplitudes
        return QfeCiphertext(PureState(out, message.n), message.n)

    def ciphertext_qubits(self, msg_qubits: int) -> int:
        return msg_qubits

    def dec(self, fk: FunctionalKey, ct: QfeCiphertext, context: GameContext) -> object:
        if isinstance(ct.payload, PureState):
            state = ct.payload
            inv = np.array(
                [self._unpermute(fk.master_seed, ct.n, y) for y in range(state.d)],
                dtype=np.int64,
            )
            out = np.zeros(state.d, dtype=complex)
            out[inv] = state.amplitudes
            message: Message = PureState(out, ct.n)
            if fk.circuit.kind != "identity":
                # Non-identity circuits read out the basis register first.
                idx = int(np.argmax(np.abs(out)))
                if abs(out[idx]) ** 2 < 1.0 - 1e-9:
                    raise ValueError("ciphertext register is not a basis state")
                message = ClassicalMessage(idx, ct.n)
        else:
            message = ClassicalMessage(self._unpermute(fk.master_seed, ct.n, ct.payload), ct.n)
        return evaluate_circuit(fk.circuit, message, context)
