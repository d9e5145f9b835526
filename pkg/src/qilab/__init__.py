"""Desk-scale quantum-information lab.

Numerically exercises channel-compression fidelity ceilings, Haar
concentration, keyed-state distinguishers, and toy security-game attack
harnesses, all under seeded, replayable randomness.
"""

from .channels import (
    FidelityBound,
    KrausChannel,
    apply,
    average_fidelity_exact,
    average_fidelity_mc,
    channel_self_fidelity_samples,
    compose,
    entanglement_fidelity,
    entanglement_fidelity_choi,
    incompressibility_bound,
    make_compressor,
    state_self_fidelities,
)
from .haar import (
    ConcentrationReport,
    SeededSampler,
    concentration_experiment,
    concentration_report,
    levy_tail_bound,
    sample_haar_state,
    sample_haar_states,
    sample_haar_unitary,
)
from .states import (
    DensityOperator,
    Projector,
    PureState,
    fidelity,
    gentle_measurement,
    partial_trace,
    tensor_product,
    trace_distance,
)

__all__ = [
    "ConcentrationReport",
    "DensityOperator",
    "FidelityBound",
    "KrausChannel",
    "Projector",
    "PureState",
    "SeededSampler",
    "apply",
    "average_fidelity_exact",
    "average_fidelity_mc",
    "channel_self_fidelity_samples",
    "compose",
    "concentration_experiment",
    "concentration_report",
    "entanglement_fidelity",
    "entanglement_fidelity_choi",
    "fidelity",
    "gentle_measurement",
    "incompressibility_bound",
    "levy_tail_bound",
    "make_compressor",
    "partial_trace",
    "sample_haar_state",
    "sample_haar_states",
    "sample_haar_unitary",
    "state_self_fidelities",
    "tensor_product",
    "trace_distance",
]
