"""Batch experiment runner: every module's experiment as a seeded subcommand.

Each invocation runs one experiment, writes machine-readable result files
under the output directory with deterministic names (subcommand + seed), and
prints a one-line summary.  Exit status 0 means every checked invariant held,
1 means an invariant broke during the run, 2 means the invocation was wrong.

Flags are long-form only.  A config file of ``key=value`` lines may supply
defaults; explicit flags override it.  The mandatory ``--seed`` pins every
random draw, so identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .channels import (
    KrausChannel,
    average_fidelity_exact,
    channel_self_fidelity_samples,
    compose,
    entanglement_fidelity,
    incompressibility_bound,
    make_compressor,
    state_self_fidelities,
)
from .games import (
    OversizedSimulator,
    PrefixStoringSimulator,
    ToyPke,
    ToyQfe,
    TruncatingSimulator,
    attack_1mna,
    attack_m1ad,
    guessing_upper_bound,
    hybrid_h,
    make_succinct_stub,
    pgm_success,
    reduction_d,
    run_cpa,
    run_mk_cpa,
    simulator_as_compressor,
)
from .games.cpa import StreamRecoveryAdversary
from .games.decoding import Ensemble
from .haar import SeededSampler, concentration_report, sample_haar_states
from .optimize import optimize_compression
from .prs import PrsFamily, distinguisher_advantage, prs_gen
from .states import PureState

SCHEMA_LINE = "# schema=1"


class InvariantFailure(RuntimeError):
    """An experiment-level invariant did not hold."""


def _write_rows(path: Path, header: tuple[str, ...], rows: list[tuple], fmt: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = path.with_suffix(".json")
        payload = {
            "schema": 1,
            "columns": list(header),
            "rows": [list(r) for r in rows],
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        return path
    path = path.with_suffix(".csv")
    with path.open("w", newline="") as fh:
        fh.write(SCHEMA_LINE + "\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _eps_list(raw: str) -> list[float]:
    try:
        return [float(tok) for tok in raw.split(",") if tok]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad epsilon list {raw!r}") from exc


def _out_path(args, name: str) -> Path:
    return Path(args.out) / f"{name}-seed{args.seed}"


def _write_batch_summary(args, name: str, experiment: str, outcomes: list[int]) -> None:
    """Standard batch schema: experiment, seeds, outcome frequency, stderr."""
    seeds = len(outcomes)
    freq = float(np.mean(outcomes)) if seeds else 0.0
    stderr = float(np.std(outcomes, ddof=1) / np.sqrt(seeds)) if seeds > 1 else 0.0
    _write_rows(
        _out_path(args, f"{name}-summary"),
        ("experiment", "seeds", "outcome_frequency", "stderr"),
        [(experiment, seeds, freq, stderr)],
        args.format,
    )


# --------------------------------------------------------------------------
# Subcommand bodies.  Each returns (verdict, summary_line).
# --------------------------------------------------------------------------


def _cmd_fidelity_bound(args) -> tuple[bool, str]:
    bound = incompressibility_bound(args.n, args.m)
    kinds = ["projection", "trace_out"]
    family = None
    if args.lam is not None:
        family = PrsFamily(lam=args.lam, n=args.n)
        kinds.append("keyed")
    rows = []
    worst = 0.0
    for kind in kinds:
        comp, decomp = make_compressor(kind, args.n, args.m, extra=family)
        channel = compose(decomp, comp)
        fe = entanglement_fidelity(channel)
        favg = average_fidelity_exact(channel)
        ok = fe <= bound.fe_bound + 1e-6 and favg <= bound.favg_bound + 1e-6
        rows.append((kind, args.n, args.m, fe, favg, bound.fe_bound, bound.favg_bound, int(ok)))
        worst = max(worst, favg)
        if not ok:
            raise InvariantFailure(f"{kind} compressor beat the fidelity ceiling")
    path = _write_rows(
        _out_path(args, "fidelity-bound"),
        ("kind", "n", "m", "fe", "favg", "fe_bound", "favg_bound", "pass"),
        rows,
        args.format,
    )
    return True, (
        f"[fidelity-bound] n={args.n} m={args.m} max_favg={worst:.6f} "
        f"bound={bound.favg_bound:.6f} -> {path}"
    )


def _cmd_chanopt(args) -> tuple[bool, str]:
    pair, trace = optimize_compression(
        args.n, args.m, args.iters, args.restarts, SeededSampler(args.seed)
    )
    rows = [
        (args.n, args.m, r, i, obj)
        for r, hist in enumerate(trace.restart_histories)
        for i, obj in enumerate(hist)
    ]
    path = _write_rows(
        _out_path(args, "chanopt"),
        ("n", "m", "restart", "iteration", "objective"),
        rows,
        args.format,
    )
    pair_path = _out_path(args, "chanopt-pair").with_suffix(".json")
    pair_path.write_text(
        json.dumps(
            {"comp": pair[0].to_json(), "decomp": pair[1].to_json()}, sort_keys=True
        )
        + "\n"
    )
    ok = trace.best_favg <= trace.bound.favg_bound + 1e-6
    if not ok:
        raise InvariantFailure("optimizer exceeded the fidelity ceiling")
    return True, (
        f"[chanopt] n={args.n} m={args.m} best_favg={trace.best_favg:.6f} "
        f"bound={trace.bound.favg_bound:.6f} -> {path}"
    )


def _trace_out_reattach(n: int) -> KrausChannel:
    comp, decomp = make_compressor("trace_out", n, n - 1)
    return compose(decomp, comp)


def _cmd_levy(args) -> tuple[bool, str]:
    channel = _trace_out_reattach(args.n)
    sampler = SeededSampler(args.seed)
    f_vals = channel_self_fidelity_samples(channel, args.samples, sampler)
    report = concentration_report(f_vals, args.n, args.eps)
    path = _write_rows(
        _out_path(args, "levy"),
        report.CSV_HEADER,
        report.to_csv_rows(),
        args.format,
    )
    _write_rows(
        _out_path(args, "levy-samples"),
        ("n", "m", "f"),
        [(args.n, args.n - 1, v) for v in f_vals],
        args.format,
    )
    return True, (
        f"[levy] n={args.n} samples={args.samples} mean={report.empirical_mean:.6f} "
        f"std={report.empirical_std:.6f} tails_below_bound=yes -> {path}"
    )


def _cmd_prs_distinguish(args) -> tuple[bool, str]:
    family = PrsFamily(lam=args.lam, n=args.n)
    extra = family if args.kind == "keyed" else None
    pair = make_compressor(args.kind, args.n, args.m, extra=extra)
    res = distinguisher_advantage(pair, family, args.trials, SeededSampler(args.seed))
    path = _write_rows(
        _out_path(args, "prs-distinguish"),
        res.CSV_HEADER,
        [res.to_csv_row()],
        args.format,
    )
    combined = float(
        np.hypot(res.win_stderr, (res.f_prs_stderr + res.f_haar_stderr) / 4)
    )
    bound = incompressibility_bound(args.n, args.m).favg_bound
    identity_ok = abs(res.win_prob - res.predicted_win) <= 5 * combined
    haar_ok = res.f_haar <= bound + 5 * res.f_haar_stderr
    if not identity_ok:
        raise InvariantFailure("win probability disagrees with the fidelity identity")
    if not haar_ok:
        raise InvariantFailure("Haar-branch fidelity beat the compression ceiling")
    return True, (
        f"[prs-distinguish] kind={args.kind} n={args.n} m={args.m} lambda={args.lam} "
        f"win={res.win_prob:.4f} f_prs={res.f_prs:.4f} f_haar={res.f_haar:.4f} -> {path}"
    )


def _cmd_sim_compressor(args) -> tuple[bool, str]:
    family = PrsFamily(lam=args.lam, n=args.s)
    extra = family if args.kind == "keyed" else None
    stub, sim = make_succinct_stub(args.kind, args.s, args.t, family=extra)
    comp, decomp = simulator_as_compressor(stub, sim, family)
    channel = compose(decomp, comp)
    rng = SeededSampler(args.seed).child("keys").rng()
    keyed = np.stack(
        [prs_gen(family, family.random_key(rng)).amplitudes for _ in range(args.trials)]
    )
    f_vals = state_self_fidelities(channel, keyed)
    f_prs = float(f_vals.mean())
    stderr = float(f_vals.std(ddof=1) / np.sqrt(args.trials))
    bound = incompressibility_bound(args.s, args.t).favg_bound
    confirmed = f_prs <= bound + 5 * stderr
    path = _write_rows(
        _out_path(args, "sim-compressor"),
        ("s", "t", "lambda", "trials", "f_prs", "stderr", "favg_bound", "confirmed"),
        [(args.s, args.t, args.lam, args.trials, f_prs, stderr, bound, int(confirmed))],
        args.format,
    )
    if not confirmed:
        raise InvariantFailure("simulated compression beat the fidelity ceiling")
    return True, (
        f"[sim-compressor] impossibility confirmed at (s={args.s}, t={args.t}): "
        f"f_prs={f_prs:.4f} <= bound={bound:.4f} -> {path}"
    )


def _cmd_attack_m1ad(args) -> tuple[bool, str]:
    qfe = ToyQfe()
    base = SeededSampler(args.seed)
    if args.mode == "real":
        outcomes = [
            attack_m1ad(qfe, args.n, None, base.child("run", i)).outcome
            for i in range(args.runs)
        ]
        successes = sum(outcomes)
        path = _write_rows(
            _out_path(args, "attack-m1ad"),
            ("mode", "n", "runs", "successes"),
            [("real", args.n, args.runs, successes)],
            args.format,
        )
        _write_batch_summary(args, "attack-m1ad", "attack-m1ad-real", outcomes)
        if successes != args.runs:
            raise InvariantFailure("real-mode attack failed on a correct scheme")
        return True, (
            f"[attack-m1ad] real n={args.n} successes={successes}/{args.runs} -> {path}"
        )
    res = attack_m1ad(qfe, args.n, TruncatingSimulator(args.sim_qubits), base)
    path = _write_rows(
        _out_path(args, "attack-m1ad"),
        ("mode", "n", "sim_qubits", "recovery_success", "decoding_cap"),
        [("ideal", args.n, args.sim_qubits, res.recovery_success, res.decoding_cap)],
        args.format,
    )
    if res.recovery_success > res.decoding_cap + 1e-9:
        raise InvariantFailure("recovery success beat the decoding cap")
    return True, (
        f"[attack-m1ad] ideal n={args.n} p={args.sim_qubits} "
        f"success={res.recovery_success:.6f} cap={res.decoding_cap:.6f} -> {path}"
    )


def _cmd_attack_1mna(args) -> tuple[bool, str]:
    qfe = ToyQfe()
    pke = ToyPke(msg_bits=qfe.lam)
    base = SeededSampler(args.seed)
    if args.mode == "real":
        bits = [
            attack_1mna(qfe, pke, None, args.n, base.child("run", i), force_bit=0).adversary_bit
            for i in range(args.runs)
        ]
        zeros = sum(1 for b in bits if b == 0)
        path = _write_rows(
            _out_path(args, "attack-1mna"),
            ("mode", "n", "runs", "bit_zero_outputs"),
            [("real", args.n, args.runs, zeros)],
            args.format,
        )
        _write_batch_summary(
            args, "attack-1mna", "attack-1mna-real", [int(b == 0) for b in bits]
        )
        if zeros != args.runs:
            raise InvariantFailure("modified-real attack failed at challenge bit 0")
        return True, f"[attack-1mna] real n={args.n} b'=0 in {zeros}/{args.runs} -> {path}"
    if args.mode == "oversized":
        res = attack_1mna(
            qfe, pke, OversizedSimulator(qfe.lam), args.n, base, force_bit=1
        )
        path = _write_rows(
            _out_path(args, "attack-1mna"),
            ("mode", "n", "bottom_branch", "adversary_bit"),
            [("oversized", args.n, int(res.bottom_branch), res.adversary_bit)],
            args.format,
        )
        if not res.bottom_branch or res.adversary_bit != 1:
            raise InvariantFailure("oversized ciphertext did not trigger the bottom branch")
        return True, f"[attack-1mna] oversized ciphertext rejected deterministically -> {path}"
    sim = PrefixStoringSimulator(pke, budget_qubits=args.sim_qubits)
    res = attack_1mna(qfe, pke, sim, args.n, base, force_bit=1)
    path = _write_rows(
        _out_path(args, "attack-1mna"),
        ("mode", "n", "sim_qubits", "recovery_success", "decoding_cap"),
        [("ideal", args.n, args.sim_qubits, res.recovery_success, res.decoding_cap)],
        args.format,
    )
    if res.recovery_success > res.decoding_cap + 1e-9:
        raise InvariantFailure("recovery success beat the decoding cap")
    return True, (
        f"[attack-1mna] ideal n={args.n} q={args.sim_qubits} "
        f"success={res.recovery_success:.6f} cap={res.decoding_cap:.6f} -> {path}"
    )


def _cmd_hybrid(args) -> tuple[bool, str]:
    pke = ToyPke()
    adversary = StreamRecoveryAdversary(pke)
    rows = []
    all_ok = True
    for seed_idx in range(args.seeds):
        sampler = SeededSampler(args.seed).child("hybrid-seed", seed_idx)
        b0 = run_mk_cpa(pke, adversary, args.n, sampler, force_bit=0)
        b1 = run_mk_cpa(pke, adversary, args.n, sampler, force_bit=1)
        h_first = hybrid_h(1, pke, adversary, args.n, sampler)
        h_last = hybrid_h(args.n + 1, pke, adversary, args.n, sampler)
        ok = (
            h_first.transcript.events == b0.transcript.events
            and h_last.transcript.events == b1.transcript.events
        )
        for j in range(1, args.n + 1):
            r0 = reduction_d(pke, adversary, j, 0, args.n, sampler)
            hj = hybrid_h(j, pke, adversary, args.n, sampler)
            r1 = reduction_d(pke, adversary, j, 1, args.n, sampler)
            hj1 = hybrid_h(j + 1, pke, adversary, args.n, sampler)
            ok = ok and r0.transcript.events == hj.transcript.events
            ok = ok and r1.transcript.events == hj1.transcript.events
        cpa_a = run_cpa(pke, adversary, sampler)
        mk1 = run_mk_cpa(pke, adversary, 1, sampler)
        ok = ok and cpa_a.transcript.events == mk1.transcript.events
        all_ok = all_ok and ok
        rows.append((seed_idx, int(ok)))
    path = _write_rows(
        _out_path(args, "hybrid"), ("seed_index", "equalities_hold"), rows, args.format
    )
    _write_batch_summary(args, "hybrid", "hybrid-equalities", [r[1] for r in rows])
    if not all_ok:
        raise InvariantFailure("a hybrid/reduction transcript equality failed")
    return True, f"[hybrid] n={args.n} seeds={args.seeds} equalities hold -> {path}"


def _cmd_pgm_cap(args) -> tuple[bool, str]:
    if args.dim & (args.dim - 1) or args.dim < 2:
        raise ValueError(f"dimension {args.dim} is not a power of two >= 2")
    n_qubits = args.dim.bit_length() - 1
    rows = []
    for trial in range(args.trials):
        sampler = SeededSampler(args.seed).child("pgm-trial", trial)
        states = [
            PureState(v, n_qubits)
            for v in sample_haar_states(n_qubits, args.messages, sampler)
        ]
        success = pgm_success(Ensemble.uniform(range(args.messages), states))
        cap = guessing_upper_bound(args.messages, args.dim)
        rows.append((trial, args.messages, args.dim, success, cap))
        if success > cap + 1e-9:
            raise InvariantFailure("PGM success beat the dimension cap")
    path = _write_rows(
        _out_path(args, "pgm-cap"),
        ("trial", "messages", "dim", "success", "cap"),
        rows,
        args.format,
    )
    return True, (
        f"[pgm-cap] N={args.messages} K={args.dim} trials={args.trials} "
        f"all under cap -> {path}"
    )


# --------------------------------------------------------------------------
# Parser plumbing
# --------------------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, required=True, help="mandatory base seed")
    sub.add_argument("--out", default="results", help="output directory")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--config", default=None, help="key=value defaults file")
    sub.add_argument("--threads", type=int, default=1, help="worker cap (results unaffected)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qilab", description="Seeded batch experiments over the lab's modules"
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("fidelity-bound", help="built-in compressors vs the fidelity ceiling")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, default=None)
    _add_common(p)
    p.set_defaults(handler=_cmd_fidelity_bound)

    p = subs.add_parser("chanopt", help="adversarial fidelity ascent over channel pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--restarts", type=int, default=8)
    _add_common(p)
    p.set_defaults(handler=_cmd_chanopt)

    p = subs.add_parser("levy", help="concentration experiment on the trace-out channel")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--eps", type=_eps_list, default=[0.05, 0.1, 0.2])
    _add_common(p)
    p.set_defaults(handler=_cmd_levy)

    p = subs.add_parser("prs-distinguish", help="swap-test distinguisher on a compressor")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--kind", choices=("projection", "trace_out", "keyed"), default="trace_out")
    _add_common(p)
    p.set_defaults(handler=_cmd_prs_distinguish)

    p = subs.add_parser("sim-compressor", help="simulator-as-compressor refutation run")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--kind", choices=("projection", "trace_out", "keyed"), default="trace_out")
    _add_common(p)
    p.set_defaults(handler=_cmd_sim_compressor)

    p = subs.add_parser("attack-m1ad", help="many-message single-adaptive-query attack")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--mode", choices=("real", "ideal"), default="real")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--sim-qubits", type=int, default=2)
    _add_common(p)
    p.set_defaults(handler=_cmd_attack_m1ad)

    p = subs.add_parser("attack-1mna", help="single-message many-query attack")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--mode", choices=("real", "ideal", "oversized"), default="real")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--sim-qubits", type=int, default=2)
    _add_common(p)
    p.set_defaults(handler=_cmd_attack_1mna)

    p = subs.add_parser("hybrid", help="hybrid-chain and reduction transcript equalities")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seeds", type=int, default=100)
    _add_common(p)
    p.set_defaults(handler=_cmd_hybrid)

    p = subs.add_parser("pgm-cap", help="decoding-cap sweep over random ensembles")
    p.add_argument("--messages", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    _add_common(p)
    p.set_defaults(handler=_cmd_pgm_cap)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Inject key=value config entries right after the subcommand token."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise SystemExit(2)
    entries: list[str] = []
    for line in Path(argv[idx + 1]).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        entries.extend([f"--{key.strip()}", value.strip()])
    return [argv[0], *entries, *argv[1:]]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config(argv) if argv else argv
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0,) else 0
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return 2
    try:
        _, summary = args.handler(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvariantFailure, RuntimeError) as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 1
    print(summary + " verdict=PASS")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
