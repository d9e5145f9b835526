"""Chosen-plaintext experiments, the many-key variant, hybrids, and the reduction.

Every piece of randomness comes from a named child stream of one sampler
(``keygen i``, ``enc i``, ``challenge-bit``, ``adversary``), so experiments
that differ only in which message goes into slot ``i`` produce transcripts
that agree event-for-event everywhere else.  That discipline is what makes
the hybrid boundary equalities and the reduction's transcript equalities
checkable literally instead of just distributionally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

from ..haar import SeededSampler
from .schemes import PkeCiphertext, ToyPke
from .transcripts import Transcript


class MkCpaAdversary(Protocol):  # pragma: no cover - structural type only
    def choose(self, pks: Sequence[int], rng) -> list[tuple[int, int]]:
        ...

    def guess(self, pks: Sequence[int], pairs, cts: Sequence[PkeCiphertext], rng) -> int:
        ...


@dataclass
class ConstantBitAdversary:
    """Outputs a fixed bit regardless of the view."""

    bit: int = 0
    message: int = 1

    def choose(self, pks, rng):
        return [(self.message, self.message ^ 1) for _ in pks]

    def guess(self, pks, pairs, cts, rng):
        return self.bit


@dataclass
class StreamRecoveryAdversary:
    """Exploits the toy scheme's weakness: decrypts slot 1 from public data."""

    scheme: ToyPke

    def choose(self, pks, rng):
        return [
            (int(rng.integers(0, 1 << self.scheme.msg_bits)),
             int(rng.integers(0, 1 << self.scheme.msg_bits)))
            for _ in pks
        ]

    def guess(self, pks, pairs, cts, rng):
        recovered = self.scheme.break_with_public_key(pks[0], cts[0])
        m0, m1 = pairs[0]
        if recovered == m0:
            return 0
        if recovered == m1:
            return 1
        return int(rng.integers(0, 2))


@dataclass
class SecretKeyOracleAdversary:
    """Test hook: reads the secret keys the engine exposes on request."""

    scheme: ToyPke
    wants_secret_keys: bool = True
    secret_keys: list[int] = field(default_factory=list)

    def choose(self, pks, rng):
        return [
            (int(rng.integers(0, 1 << self.scheme.msg_bits)),
             int(rng.integers(0, 1 << self.scheme.msg_bits)))
            for _ in pks
        ]

    def guess(self, pks, pairs, cts, rng):
        recovered = self.scheme.dec(self.secret_keys[0], cts[0])
        m0, m1 = pairs[0]
        return 0 if recovered == m0 else 1


@dataclass(frozen=True)
class CpaRun:
    outcome: int
    challenge_bit: int
    adversary_bit: int
    transcript: Transcript


def _cpa_engine(
    scheme: ToyPke,
    adversary: MkCpaAdversary,
    sampler: SeededSampler,
    n: int,
    slot_bits: Sequence[int],
    challenge_bit: int | None,
    label: str,
) -> CpaRun:
    """Shared body of CPA, MK-CPA, and every hybrid.

    ``slot_bits[i]`` picks which of the adversary's pair goes into slot ``i``
    (1-indexed slots, list given 0-indexed).  ``challenge_bit`` is the bit the
    outcome is scored against; hybrids pass ``None`` and score the raw guess.
    """
    transcript = Transcript(meta={"experiment": label, "n": n})
    transcript.record("adversary", "announce-n", {"n": n})
    keys = []
    for i in range(1, n + 1):
        sk, pk = scheme.gen(sampler.child("keygen", i))
        keys.append((sk, pk))
        transcript.record("challenger", "keygen", {"i": i, "pk": pk})
    pks = [pk for _, pk in keys]
    if getattr(adversary, "wants_secret_keys", False):
        adversary.secret_keys = [sk for sk, _ in keys]
    pairs = adversary.choose(pks, sampler.child("adversary", 0).rng())
    if len(pairs) != n:
        raise ValueError(f"adversary produced {len(pairs)} message pairs, expected {n}")
    transcript.record("adversary", "choose", {"pairs": pairs})
    cts = []
    for i in range(1, n + 1):
        m0, m1 = pairs[i - 1]
        chosen = m1 if slot_bits[i - 1] else m0
        ct = scheme.enc(pks[i - 1], chosen, sampler.child("enc", i))
        cts.append(ct)
        transcript.record("challenger", "encrypt", {"i": i, "ct": ct})
    guess = int(adversary.guess(pks, pairs, cts, sampler.child("adversary", 1).rng()))
    transcript.record("adversary", "guess", {"bit": guess})
    if challenge_bit is None:
        outcome = guess
    else:
        outcome = int(guess == challenge_bit)
        transcript.meta["challenge_bit"] = challenge_bit
    transcript.outcome = outcome
    return CpaRun(outcome, -1 if challenge_bit is None else challenge_bit, guess, transcript)


def run_mk_cpa(
    scheme: ToyPke,
    adversary: MkCpaAdversary,
    n: int,
    sampler: SeededSampler,
    force_bit: int | None = None,
) -> CpaRun:
    """The many-key chosen-plaintext experiment; outcome 1 iff the guess is right.

    ``force_bit`` pins the challenge bit (test hook for branch comparisons);
    the bit draw comes from its own child stream either way, so forcing it
    does not shift any other event.
    """
    if n < 1:
        raise ValueError("need at least one key slot")
    if force_bit is None:
        b = int(sampler.child("challenge-bit").rng().integers(0, 2))
    else:
        b = int(force_bit)
    return _cpa_engine(scheme, adversary, sampler, n, [b] * n, b, "mk-cpa")


def run_cpa(
    scheme: ToyPke,
    adversary: MkCpaAdversary,
    sampler: SeededSampler,
    force_bit: int | None = None,
) -> CpaRun:
    """Single-key chosen plaintext: the many-key experiment pinned to n = 1."""
    return run_mk_cpa(scheme, adversary, 1, sampler, force_bit=force_bit)


def hybrid_h(
    j: int,
    scheme: ToyPke,
    adversary: MkCpaAdversary,
    n: int,
    sampler: SeededSampler,
) -> CpaRun:
    """Hybrid ``H_j``: slot ``i`` encrypts the pair's second message iff ``i < j``.

    ``H_1`` reproduces the bit-0 branch of the many-key experiment and
    ``H_{n+1}`` the bit-1 branch, event-for-event under a shared sampler.
    The outcome is the adversary's raw guess.
    """
    if not 1 <= j <= n + 1:
        raise ValueError(f"hybrid index {j} outside [1, {n + 1}]")
    slot_bits = [1 if i < j else 0 for i in range(1, n + 1)]
    return _cpa_engine(scheme, adversary, sampler, n, slot_bits, None, f"hybrid-{j}")


def reduction_d(
    scheme: ToyPke,
    adversary: MkCpaAdversary,
    j: int,
    challenge_bit: int,
    n: int,
    sampler: SeededSampler,
) -> CpaRun:
    """The single-key attacker built from a many-key adversary.

    An explicit external single-key challenger owns slot ``j``: it generates
    that key pair and encrypts one message of the pair under its own bit.
    The reduction samples every other key pair itself, encrypts slots below
    ``j`` with the second message and slots above with the first, and replays
    the many-key adversary on the assembled view.  Because the external
    challenger draws from exactly the child streams the hybrid would use for
    slot ``j``, the induced inner transcript equals ``H_j`` when the external
    bit is 0 and ``H_{j+1}`` when it is 1.
    """
    if not 1 <= j <= n:
        raise ValueError(f"slot index {j} outside [1, {n}]")
    if challenge_bit not in (0, 1):
        raise ValueError("challenge bit must be 0 or 1")
    transcript = Transcript(meta={"experiment": f"reduction-j{j}-b{challenge_bit}", "n": n})

    # External single-key challenger, seeded on the hybrid's slot-j streams.
    external_sk, external_pk = scheme.gen(sampler.child("keygen", j))

    transcript.record("adversary", "announce-n", {"n": n})
    pks: list[int] = []
    for i in range(1, n + 1):
        if i == j:
            pk = external_pk
        else:
            _, pk = scheme.gen(sampler.child("keygen", i))
        pks.append(pk)
        transcript.record("challenger", "keygen", {"i": i, "pk": pk})
    pairs = adversary.choose(pks, sampler.child("adversary", 0).rng())
    if len(pairs) != n:
        raise ValueError(f"adversary produced {len(pairs)} message pairs, expected {n}")
    transcript.record("adversary", "choose", {"pairs": pairs})

    # External challenger encrypts the pair at slot j under its bit.
    external_ct = scheme.enc(
        external_pk, pairs[j - 1][challenge_bit], sampler.child("enc", j)
    )
    cts: list[PkeCiphertext] = []
    for i in range(1, n + 1):
        if i == j:
            ct = external_ct
        else:
            m0, m1 = pairs[i - 1]
            ct = scheme.enc(pks[i - 1], m1 if i < j else m0, sampler.child("enc", i))
        cts.append(ct)
        transcript.record("challenger", "encrypt", {"i": i, "ct": ct})
    guess = int(adversary.guess(pks, pairs, cts, sampler.child("adversary", 1).rng()))
    transcript.record("adversary", "guess", {"bit": guess})
    transcript.outcome = guess
    return CpaRun(guess, challenge_bit, guess, transcript)
