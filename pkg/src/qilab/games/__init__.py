"""Security-game state machines, toy schemes, attacks, and decoding oracles."""

from .attacks import (
    Attack1mnaResult,
    ChannelSimulator,
    M1adResult,
    OversizedSimulator,
    PrefixStoringSimulator,
    SuccinctQfeStub,
    TruncatingSimulator,
    attack_1mna,
    attack_m1ad,
    make_succinct_stub,
    simulator_as_compressor,
)
from .cpa import (
    ConstantBitAdversary,
    CpaRun,
    SecretKeyOracleAdversary,
    StreamRecoveryAdversary,
    hybrid_h,
    reduction_d,
    run_cpa,
    run_mk_cpa,
)
from .decoding import (
    DecodingCapViolation,
    Ensemble,
    guessing_upper_bound,
    min_qubits_to_convey,
    pgm_success,
)
from .experiments import (
    DecryptionCheckAdversary,
    EchoEvaluationSimulator,
    FirewallViolation,
    NosySimulator,
    ProtocolViolation,
    SimulatorView,
    run_sim_experiment,
)
from .schemes import (
    Circuit,
    ClassicalMessage,
    FunctionalKey,
    GameContext,
    IDENTITY_CIRCUIT,
    PkeCiphertext,
    QfeCiphertext,
    ToyPke,
    ToyQfe,
    evaluate_circuit,
    message_qubits,
    pke_enc_circuit,
    prs_gen_circuit,
)
from .transcripts import Transcript, TranscriptEvent, payload_digest

__all__ = [
    "Attack1mnaResult",
    "ChannelSimulator",
    "Circuit",
    "ClassicalMessage",
    "ConstantBitAdversary",
    "CpaRun",
    "DecodingCapViolation",
    "DecryptionCheckAdversary",
    "EchoEvaluationSimulator",
    "Ensemble",
    "FirewallViolation",
    "FunctionalKey",
    "GameContext",
    "IDENTITY_CIRCUIT",
    "M1adResult",
    "NosySimulator",
    "OversizedSimulator",
    "PkeCiphertext",
    "PrefixStoringSimulator",
    "ProtocolViolation",
    "QfeCiphertext",
    "SecretKeyOracleAdversary",
    "SimulatorView",
    "StreamRecoveryAdversary",
    "SuccinctQfeStub",
    "ToyPke",
    "ToyQfe",
    "Transcript",
    "TranscriptEvent",
    "TruncatingSimulator",
    "attack_1mna",
    "attack_m1ad",
    "evaluate_circuit",
    "guessing_upper_bound",
    "hybrid_h",
    "make_succinct_stub",
    "message_qubits",
    "min_qubits_to_convey",
    "payload_digest",
    "pgm_success",
    "pke_enc_circuit",
    "prs_gen_circuit",
    "reduction_d",
    "run_cpa",
    "run_mk_cpa",
    "run_sim_experiment",
    "simulator_as_compressor",
]
