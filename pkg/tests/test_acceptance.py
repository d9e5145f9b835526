"""Acceptance suite: one test per primary criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.  Every tolerance is pinned here; nothing is calibrated at
run time.
"""

import math
import time

import numpy as np
import pytest

from qilab.channels import (
    KrausChannel,
    average_fidelity_exact,
    average_fidelity_mc,
    compose,
    entanglement_fidelity,
    entanglement_fidelity_choi,
    incompressibility_bound,
    make_compressor,
)
from qilab.games import (
    Ensemble,
    OversizedSimulator,
    PrefixStoringSimulator,
    ToyPke,
    ToyQfe,
    TruncatingSimulator,
    attack_1mna,
    attack_m1ad,
    guessing_upper_bound,
    hybrid_h,
    pgm_success,
    reduction_d,
    run_cpa,
    run_mk_cpa,
)
from qilab.games.cpa import StreamRecoveryAdversary
from qilab.haar import SeededSampler, concentration_experiment, haar_isometry, sample_haar_state
from qilab.optimize import optimize_compression
from qilab.prs import PrsFamily, distinguisher_advantage
from qilab.states import (
    DensityOperator,
    Projector,
    PureState,
    fidelity,
    gentle_measurement,
    trace_distance,
)


def report(name: str, ok: bool, detail: str, started: float) -> bool:
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {name}: {status} ({detail}) [{time.time() - started:.1f}s]")
    return ok


def random_square_channel(n: int, env_qubits: int, sampler: SeededSampler) -> KrausChannel:
    v = haar_isometry(2 ** (n + env_qubits), 2**n, sampler)
    return KrausChannel.from_isometry(v, n, env_qubits, n)


def test_fidelity_relation_oracle():
    """Both fidelity paths agree and the Monte-Carlo oracle confirms the relation."""
    t0 = time.time()
    sampler = SeededSampler(2024)
    count = 0
    for i in range(50):
        n = 1 + (i % 3)
        d = 2**n
        ch = random_square_channel(n, 1 + (i % 2), sampler.at(i))
        fe = entanglement_fidelity(ch)
        fe_choi = entanglement_fidelity_choi(ch)
        assert abs(fe - fe_choi) <= 1e-9, f"channel {i}: paths differ by {abs(fe - fe_choi)}"
        favg = average_fidelity_exact(ch)
        assert abs(favg - (d * fe + 1) / (d + 1)) <= 1e-12
        mean, stderr = average_fidelity_mc(ch, 100_000, sampler.child("mc", i))
        assert abs(mean - favg) <= 5 * max(stderr, 1e-12), f"channel {i}: MC off"
        count += 1
    assert report("fidelity-relation", count == 50, f"{count} channels checked", t0)


CONFIGS = [(2, 1), (3, 1), (3, 2), (4, 2), (4, 3)]


def test_incompressibility_bound_builtins_and_optimizer():
    """No compressor, built-in or optimized, beats (2^m+1)/(2^n+1)."""
    t0 = time.time()
    checked = 0
    for n, m in CONFIGS:
        bound = incompressibility_bound(n, m)
        family = PrsFamily(lam=m, n=n)
        for kind in ("projection", "trace_out", "keyed"):
            comp, decomp = make_compressor(kind, n, m, extra=family)
            channel = compose(decomp, comp)
            assert entanglement_fidelity(channel) <= bound.fe_bound + 1e-6
            assert average_fidelity_exact(channel) <= bound.favg_bound + 1e-6
            checked += 1
        _, trace = optimize_compression(
            n, m, iters=400, restarts=8, sampler=SeededSampler(100 + n * 10 + m)
        )
        assert trace.best_favg <= bound.favg_bound + 1e-6
        checked += 1
    assert incompressibility_bound(2, 1).favg_bound == 3 / 5
    assert report(
        "incompressibility-bound",
        True,
        f"{checked} compressors under the ceiling; (2,1) ceiling exactly 3/5",
        t0,
    )


def test_incompressibility_bound_optimizer_reaches_half_at_two_one():
    """The ascent with 8 restarts must reach average fidelity 0.5 at (2, 1)."""
    t0 = time.time()
    _, trace = optimize_compression(2, 1, iters=500, restarts=8, sampler=SeededSampler(77))
    ok = trace.best_favg >= 0.5
    assert report(
        "incompressibility-optimizer-baseline",
        ok,
        f"best_favg={trace.best_favg:.6f}, required >= 0.5",
        t0,
    )


def test_one_qubit_compression_curve():
    """Single-qubit compression keeps average fidelity at or below 1/2 + 2/2^n."""
    t0 = time.time()
    for n in range(2, 9):
        ceiling = 0.5 + 2 / 2**n
        assert incompressibility_bound(n, n - 1).favg_bound <= ceiling
        for kind in ("projection", "trace_out"):
            comp, decomp = make_compressor(kind, n, n - 1)
            favg = average_fidelity_exact(compose(decomp, comp))
            assert favg <= ceiling, f"{kind} at n={n}: {favg} > {ceiling}"
    assert report("one-qubit-compression", True, "n=2..8 under 1/2 + 2/2^n", t0)


def test_concentration_sharpens_with_dimension():
    """Sampled self-fidelity spread shrinks with n and stays under the tail bound."""
    t0 = time.time()
    stds = []
    for idx, n in enumerate((4, 6, 8, 10)):
        comp, decomp = make_compressor("trace_out", n, n - 1)
        channel = compose(decomp, comp)
        report_n = concentration_experiment(
            channel, 10_000, [0.05, 0.1, 0.2], SeededSampler(3000 + idx)
        )  # raises if any tail beats the analytic bound
        stds.append(report_n.empirical_std)
    strictly_decreasing = all(a > b for a, b in zip(stds, stds[1:]))
    assert report(
        "concentration",
        strictly_decreasing,
        "std " + " > ".join(f"{s:.5f}" for s in stds),
        t0,
    )
    assert strictly_decreasing


def test_swap_test_algebra():
    """Measured win probabilities track 1/2 + (f_prs - f_haar)/4 on all fixtures."""
    t0 = time.time()
    # Identity fixture: zero advantage, pinned at exactly 1/2.
    fam3 = PrsFamily(lam=16, n=3)
    ident = KrausChannel.identity(3)
    res_id = distinguisher_advantage((ident, ident), fam3, 10_000, SeededSampler(41))
    assert res_id.win_prob == pytest.approx(0.5, abs=1e-9)

    fam65 = PrsFamily(lam=32, n=6)
    res_trace = distinguisher_advantage(
        make_compressor("trace_out", 6, 5), fam65, 10_000, SeededSampler(42)
    )
    fam2 = PrsFamily(lam=2, n=6)
    res_keyed = distinguisher_advantage(
        make_compressor("keyed", 6, 2, extra=fam2), fam2, 10_000, SeededSampler(43)
    )
    for res in (res_id, res_trace, res_keyed):
        combined = math.hypot(res.win_stderr, (res.f_prs_stderr + res.f_haar_stderr) / 4)
        assert abs(res.win_prob - res.predicted_win) <= 5 * max(combined, 1e-12)
    assert res_keyed.win_prob >= 0.65
    assert report(
        "swap-test-algebra",
        True,
        f"identity={res_id.win_prob:.4f} trace_out={res_trace.win_prob:.4f} "
        f"keyed={res_keyed.win_prob:.4f}",
        t0,
    )


def test_decoding_cap():
    """PGM success never beats K/N; the adaptive attack obeys and exploits it."""
    t0 = time.time()
    from qilab.haar import sample_haar_states

    for n_messages in (16, 64, 256):
        for dim_qubits in (1, 2):
            states = [
                PureState(v, dim_qubits)
                for v in sample_haar_states(
                    dim_qubits, n_messages, SeededSampler(5000 + n_messages + dim_qubits)
                )
            ]
            success = pgm_success(Ensemble.uniform(range(n_messages), states))
            assert success <= guessing_upper_bound(n_messages, 2**dim_qubits) + 1e-9

    qfe = ToyQfe()
    ideal = attack_m1ad(qfe, 8, TruncatingSimulator(2), SeededSampler(51))
    assert ideal.recovery_success <= 2 ** (2 - 8) + 1e-9

    base = SeededSampler(52)
    real_wins = sum(
        attack_m1ad(qfe, 8, None, base.child("run", i)).outcome for i in range(1000)
    )
    assert report(
        "decoding-cap",
        real_wins == 1000,
        f"ideal success={ideal.recovery_success:.6f} <= 1/64; real {real_wins}/1000",
        t0,
    )
    assert real_wins == 1000


def test_hybrid_soundness():
    """Reduction and hybrid transcripts agree literally across shared seeds."""
    t0 = time.time()
    pke = ToyPke()
    adv = StreamRecoveryAdversary(pke)
    n = 4
    for seed in range(100):
        sampler = SeededSampler(6000).child("seed", seed)
        for j in range(1, n + 1):
            r0 = reduction_d(pke, adv, j, 0, n, sampler)
            assert r0.transcript.events == hybrid_h(j, pke, adv, n, sampler).transcript.events
            r1 = reduction_d(pke, adv, j, 1, n, sampler)
            assert (
                r1.transcript.events == hybrid_h(j + 1, pke, adv, n, sampler).transcript.events
            )
        b0 = run_mk_cpa(pke, adv, n, sampler, force_bit=0)
        b1 = run_mk_cpa(pke, adv, n, sampler, force_bit=1)
        assert hybrid_h(1, pke, adv, n, sampler).transcript.events == b0.transcript.events
        assert hybrid_h(n + 1, pke, adv, n, sampler).transcript.events == b1.transcript.events
        cpa = run_cpa(pke, adv, sampler)
        mk1 = run_mk_cpa(pke, adv, 1, sampler)
        assert cpa.transcript.events == mk1.transcript.events
        assert cpa.outcome == mk1.outcome
    assert report("hybrid-soundness", True, "100 seeds, all transcript equalities hold", t0)


def test_attack_1mna_pipeline():
    """Real runs always pass the trap at bit 0; size and recovery rules bind."""
    t0 = time.time()
    qfe = ToyQfe()
    pke = ToyPke(msg_bits=qfe.lam)
    base = SeededSampler(7000)
    zeros = sum(
        attack_1mna(qfe, pke, None, 8, base.child("run", i), force_bit=0).adversary_bit == 0
        for i in range(1000)
    )
    assert zeros == 1000

    for seed in range(50):
        res = attack_1mna(
            qfe, pke, OversizedSimulator(qfe.lam), 8, base.child("fat", seed), force_bit=1
        )
        assert res.bottom_branch and res.adversary_bit == 1

    restricted = PrefixStoringSimulator(pke, budget_qubits=2)
    res = attack_1mna(qfe, pke, restricted, 8, SeededSampler(7001), force_bit=1)
    assert res.recovery_success <= res.decoding_cap + 1e-9
    assert res.decoding_cap == pytest.approx(2 ** (2 - 8))
    assert report(
        "attack-1mna",
        True,
        f"b'=0 in {zeros}/1000; bottom branch deterministic; "
        f"recovery {res.recovery_success:.6f} <= cap {res.decoding_cap:.6f}",
        t0,
    )


def test_core_invariant_suites():
    """Distance/fidelity inequalities hold over a thousand random fixtures each."""
    t0 = time.time()
    rng = np.random.default_rng(8000)

    def random_density(n):
        d = 2**n
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        mat = g @ g.conj().T
        return DensityOperator(mat / np.trace(mat), n)

    for _ in range(1000):
        n = int(rng.integers(1, 3))
        a, b = random_density(n), random_density(n)
        assert 1 - math.sqrt(fidelity(a, b)) <= trace_distance(a, b) + 1e-9

    sampler = SeededSampler(8001)
    for i in range(1000):
        n = 1 + (i % 3)
        psi = sample_haar_state(n, sampler.at(2 * i))
        phi = sample_haar_state(n, sampler.at(2 * i + 1))
        lhs = 2 * trace_distance(psi.density(), phi.density())
        assert lhs <= 2 * np.linalg.norm(psi.amplitudes - phi.amplitudes) + 1e-9

    done = 0
    while done < 1000:
        n = int(rng.integers(1, 3))
        rho = random_density(n)
        keep = int(rng.integers(1, 2**n + 1))
        basis = np.linalg.qr(
            rng.standard_normal((2**n, keep)) + 1j * rng.standard_normal((2**n, keep))
        )[0]
        pi = Projector(basis @ basis.conj().T)
        if float(np.real(np.trace(pi.matrix @ rho.matrix))) < 1e-6:
            continue
        prob, post = gentle_measurement(rho, pi)
        assert trace_distance(post, rho) <= 2 * math.sqrt(1 - prob) + 1e-9
        done += 1
    assert report("core-invariants", True, "3 x 1000 fixtures", t0)
