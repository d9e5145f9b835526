"""The single-message simulation-security experiments, real and ideal.

The ideal world enforces an information firewall: the simulator role is
handed a view object containing exactly the queried circuit, its evaluation
on the challenge message, and the message length.  The raw message is not in
the view; touching the guarded attribute raises.  Post-challenge key queries
exist only in the adaptive timing and are routed to the simulator's second
stage, never its first.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Literal, Protocol

from ..haar import SeededSampler
from .schemes import (
    Circuit,
    FunctionalKey,
    GameContext,
    Message,
    QfeCiphertext,
    ToyQfe,
    evaluate_circuit,
    message_qubits,
)
from .transcripts import Transcript

World = Literal["real", "ideal"]
Timing = Literal["na", "ad"]


class FirewallViolation(RuntimeError):
    """A role reached for data outside its allowed view."""


class ProtocolViolation(RuntimeError):
    """A role broke the experiment's turn or size structure."""


@dataclass(frozen=True)
class SimulatorView:
    """Exactly what a non-adaptive simulator may see: ``(C, C(m), 1^|m|)``."""

    circuit: Circuit | None
    evaluation: Any
    message_length: int | None

    @property
    def message(self) -> Any:
        raise FirewallViolation("simulator view does not include the message")

    @property
    def master_state(self) -> Any:
        raise FirewallViolation("simulator view does not include adversary state")


class QfeAdversary(Protocol):  # pragma: no cover - structural type only
    def first(self, oracle: Callable[[Circuit], FunctionalKey], rng) -> tuple[Message, Any]:
        ...

    def second(self, ct: QfeCiphertext, st: Any, rng, oracle=None) -> int:
        ...


class _KeygenOracle:
    """Records queries, enforces the single-query budget, serves honest keys."""

    def __init__(self, scheme: ToyQfe, mk: int, transcript: Transcript, stage: str,
                 responder: Callable[[Circuit], FunctionalKey], budget: int = 1) -> None:
        self._scheme = scheme
        self._mk = mk
        self._transcript = transcript
        self._stage = stage
        self._responder = responder
        self._budget = budget
        self.queries: list[Circuit] = []

    def __call__(self, circuit: Circuit) -> FunctionalKey:
        if len(self.queries) >= self._budget:
            raise ProtocolViolation(f"key-query budget {self._budget} exhausted in {self._stage}")
        self.queries.append(circuit)
        self._transcript.record("adversary", f"keygen-query-{self._stage}", circuit.identifier())
        fk = self._responder(circuit)
        self._transcript.record("challenger", f"keygen-reply-{self._stage}", fk.circuit.identifier())
        return fk


def run_sim_experiment(
    world: World,
    timing: Timing,
    scheme: ToyQfe,
    adversary: QfeAdversary,
    simulator: Any,
    sampler: SeededSampler,
    context: GameContext | None = None,
) -> Transcript:
    """One execution of the 1-message simulation-security experiment.

    Returns the transcript; ``transcript.outcome`` is the adversary's output.
    In the ideal adaptive world the simulator must expose ``sim1`` and
    ``sim2``; in the ideal non-adaptive world a single ``sim`` callable.
    """
    if world not in ("real", "ideal") or timing not in ("na", "ad"):
        raise ValueError(f"unknown experiment mode ({world}, {timing})")
    if world == "ideal" and simulator is None:
        raise ValueError("ideal world needs a simulator")
    context = context or GameContext()
    transcript = Transcript(meta={"world": world, "timing": timing})

    mk = scheme.setup(sampler.child("setup"))
    transcript.record("challenger", "setup", {"mk": mk})

    pre_oracle = _KeygenOracle(
        scheme, mk, transcript, "pre", lambda c: scheme.keygen(mk, c)
    )
    message, st = adversary.first(pre_oracle, sampler.child("adversary", 0).rng())
    transcript.record("adversary", "message", {"len": message_qubits(message)})

    queried = pre_oracle.queries[0] if pre_oracle.queries else None
    if world == "real":
        ct = scheme.enc(mk, message)
        transcript.record("challenger", "encrypt", ct)
    else:
        if queried is not None:
            eval_context = GameContext(context.pke, sampler.child("circuit-eval"))
            view = SimulatorView(
                circuit=queried,
                evaluation=evaluate_circuit(queried, message, eval_context),
                message_length=message_qubits(message),
            )
        else:
            view = SimulatorView(None, None, None)
        sim1 = simulator.sim1 if timing == "ad" else simulator.sim
        ct = sim1(scheme.lam, mk, view, sampler.child("sim", 1).rng())
        stage = "sim1" if timing == "ad" else "sim"
        transcript.record("simulator", f"{stage}-ciphertext", ct)
    if ct.qubits > scheme.ciphertext_qubits(message_qubits(message)):
        raise ProtocolViolation(
            f"ciphertext of {ct.qubits} qubits exceeds declared bound "
            f"{scheme.ciphertext_qubits(message_qubits(message))}"
        )

    post_oracle = None
    if timing == "ad":
        if world == "real":
            post_oracle = _KeygenOracle(
                scheme, mk, transcript, "post", lambda c: scheme.keygen(mk, c)
            )
        else:
            def _sim2_responder(circuit: Circuit) -> FunctionalKey:
                eval_context = GameContext(context.pke, sampler.child("circuit-eval-post"))
                evaluation = evaluate_circuit(circuit, message, eval_context)
                return simulator.sim2(
                    scheme.lam,
                    mk,
                    circuit,
                    evaluation,
                    message_qubits(message),
                    sampler.child("sim", 2).rng(),
                )

            post_oracle = _KeygenOracle(
                scheme, mk, transcript, "sim2", _sim2_responder
            )

    alpha = adversary.second(ct, st, sampler.child("adversary", 1).rng(), oracle=post_oracle)
    transcript.record("adversary", "output", {"alpha": alpha})
    transcript.outcome = int(alpha)
    return transcript


@dataclass
class DecryptionCheckAdversary:
    """Queries one circuit, decrypts the challenge, outputs 1 on a match.

    ``query_late`` moves the key query after the challenge (adaptive order).
    """

    scheme: ToyQfe
    circuit: Circuit
    message: Message
    expected: Any
    context: GameContext
    query_late: bool = False
    last_decryption: Any = None

    def first(self, oracle, rng):
        if self.query_late:
            return self.message, {"fk": None}
        fk = oracle(self.circuit)
        return self.message, {"fk": fk}

    def second(self, ct, st, rng, oracle=None) -> int:
        fk = st["fk"]
        if fk is None:
            if oracle is None:
                raise ProtocolViolation("late query requested but no post-challenge oracle")
            fk = oracle(self.circuit)
        out = self.scheme.dec(fk, ct, self.context)
        self.last_decryption = out
        return int(_outputs_match(out, self.expected))


def _outputs_match(actual: Any, expected: Any) -> bool:
    from ..states import PureState, fidelity

    if isinstance(actual, PureState) and isinstance(expected, PureState):
        return fidelity(actual.density(), expected.density()) >= 1.0 - 1e-6
    return actual == expected


@dataclass(frozen=True)
class EchoEvaluationSimulator:
    """Ideal-world baseline: re-encrypt the evaluation it is allowed to see."""

    scheme: ToyQfe

    def sim(self, lam: int, mk: int, view: SimulatorView, rng) -> QfeCiphertext:
        if view.circuit is None:
            raise ProtocolViolation("echo simulator needs a queried circuit")
        return self.scheme.enc(mk, view.evaluation)

    # Adaptive timing reuses the same behaviour for stage 1.
    def sim1(self, lam: int, mk: int, view: SimulatorView, rng) -> QfeCiphertext:
        if view.circuit is None:
            from .schemes import ClassicalMessage

            return self.scheme.enc(mk, ClassicalMessage(0, view.message_length or 1))
        return self.scheme.enc(mk, view.evaluation)

    def sim2(self, lam, mk, circuit, evaluation, message_length, rng) -> FunctionalKey:
        return FunctionalKey(mk, circuit)


@dataclass(frozen=True)
class NosySimulator:
    """Test double that tries to read the guarded message attribute."""

    scheme: ToyQfe

    def sim(self, lam: int, mk: int, view: SimulatorView, rng) -> QfeCiphertext:
        _ = view.message  # raises FirewallViolation
        raise AssertionError("unreachable")
