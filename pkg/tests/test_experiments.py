"""Single-message simulation-security experiments: ordering, firewall, replay."""

import pytest

from qilab.games import (
    ClassicalMessage,
    DecryptionCheckAdversary,
    EchoEvaluationSimulator,
    FirewallViolation,
    GameContext,
    IDENTITY_CIRCUIT,
    NosySimulator,
    ProtocolViolation,
    QfeCiphertext,
    SimulatorView,
    ToyQfe,
    run_sim_experiment,
)
from qilab.haar import SeededSampler


def checking_adversary(qfe, value=0, query_late=False):
    msg = ClassicalMessage(value, 1)
    return DecryptionCheckAdversary(
        qfe, IDENTITY_CIRCUIT, msg, msg, GameContext(), query_late=query_late
    )


class TestRealExperiments:
    def test_real_na_identity_decrypts(self):
        qfe = ToyQfe()
        t = run_sim_experiment("real", "na", qfe, checking_adversary(qfe), None, SeededSampler(1))
        assert t.outcome == 1
        kinds = [e.kind for e in t.events]
        assert kinds == [
            "setup",
            "keygen-query-pre",
            "keygen-reply-pre",
            "message",
            "encrypt",
            "output",
        ]

    def test_real_ad_late_query(self):
        qfe = ToyQfe()
        t = run_sim_experiment(
            "real", "ad", qfe, checking_adversary(qfe, query_late=True), None, SeededSampler(2)
        )
        assert t.outcome == 1
        kinds = [e.kind for e in t.events]
        assert "keygen-query-post" in kinds
        assert kinds.index("keygen-query-post") > kinds.index("encrypt")


class TestIdealExperiments:
    def test_echo_simulator_matches_real_for_identity(self):
        qfe = ToyQfe()
        sim = EchoEvaluationSimulator(qfe)
        t_real = run_sim_experiment(
            "real", "na", qfe, checking_adversary(qfe), None, SeededSampler(3)
        )
        t_ideal = run_sim_experiment(
            "ideal", "na", qfe, checking_adversary(qfe), sim, SeededSampler(3)
        )
        assert t_ideal.outcome == t_real.outcome == 1
        ct_real = next(e for e in t_real.events if e.kind == "encrypt")
        ct_ideal = next(e for e in t_ideal.events if e.kind == "sim-ciphertext")
        assert ct_real.payload == ct_ideal.payload  # same delivered state

    def test_replay_determinism(self):
        qfe = ToyQfe()
        sim = EchoEvaluationSimulator(qfe)
        runs = [
            run_sim_experiment(
                "ideal", "na", qfe, checking_adversary(qfe), sim, SeededSampler(4)
            )
            for _ in range(2)
        ]
        assert runs[0].events == runs[1].events
        assert runs[0].outcome == runs[1].outcome

    def test_ad_routes_late_query_to_sim2(self):
        qfe = ToyQfe()
        sim = EchoEvaluationSimulator(qfe)
        t = run_sim_experiment(
            "ideal",
            "ad",
            qfe,
            checking_adversary(qfe, value=1, query_late=True),
            sim,
            SeededSampler(5),
        )
        kinds = [e.kind for e in t.events]
        assert "keygen-query-sim2" in kinds
        assert "sim1-ciphertext" in kinds
        # The blind stage-one simulator encrypts a placeholder, so the naive
        # echo strategy fails exactly when the query arrives late.
        assert t.outcome == 0

    def test_firewall_blocks_message_access(self):
        qfe = ToyQfe()
        with pytest.raises(FirewallViolation, match="message"):
            run_sim_experiment(
                "ideal", "na", qfe, checking_adversary(qfe), NosySimulator(qfe), SeededSampler(6)
            )

    def test_view_carries_only_allowed_fields(self):
        view = SimulatorView(IDENTITY_CIRCUIT, "evaluation", 4)
        assert view.circuit is IDENTITY_CIRCUIT
        assert view.message_length == 4
        with pytest.raises(FirewallViolation):
            _ = view.message

    def test_ideal_needs_simulator(self):
        qfe = ToyQfe()
        with pytest.raises(ValueError, match="simulator"):
            run_sim_experiment("ideal", "na", qfe, checking_adversary(qfe), None, SeededSampler(7))


class TestProtocolEnforcement:
    def test_query_budget(self):
        qfe = ToyQfe()

        class GreedyAdversary:
            def first(self, oracle, rng):
                oracle(IDENTITY_CIRCUIT)
                oracle(IDENTITY_CIRCUIT)
                raise AssertionError("unreachable")

            def second(self, ct, st, rng, oracle=None):  # pragma: no cover
                return 0

        with pytest.raises(ProtocolViolation, match="budget"):
            run_sim_experiment("real", "na", qfe, GreedyAdversary(), None, SeededSampler(8))

    def test_oversized_simulated_ciphertext(self):
        qfe = ToyQfe()

        class FatSimulator:
            def sim(self, lam, mk, view, rng):
                return QfeCiphertext(0, 5)  # message is 1 qubit

        with pytest.raises(ProtocolViolation, match="exceeds"):
            run_sim_experiment(
                "ideal", "na", qfe, checking_adversary(qfe), FatSimulator(), SeededSampler(9)
            )

    def test_unknown_mode_rejected(self):
        qfe = ToyQfe()
        with pytest.raises(ValueError, match="unknown"):
            run_sim_experiment("half-real", "na", qfe, checking_adversary(qfe), None, SeededSampler(10))
