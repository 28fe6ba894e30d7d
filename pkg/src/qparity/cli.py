"""Command-line front end: simulate, solve, verify, table, sample.

Exit codes: 0 success (or all checks passed), 1 infeasible spec or failed
checks, 2 usage/input errors, 3 resource-envelope violations.
"""
from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import solver, states, verify
from .linalg import Ket, Operator, plus_state
from .module import (
    CouplingKind,
    ModuleConfig,
    OutcomeRecord,
    ResourceLimitError,
    run_module,
)
from .reports import SCHEMA_VERSION, canonical_json, fmt_float, fmt_fraction, with_checksum


def load_amplitude_file(path: str | Path) -> Ket:
    """Read a state from the plain-text amplitude format.

    First significant line: ``dims: d1 d2 ... dk``; then one ``re im`` pair
    per basis index in mixed-radix order.  Blank lines and ``#`` comments
    are ignored.  The state must be normalized to within 1e-6 and is
    renormalized exactly on load.
    """
    lines = []
    for raw in Path(path).read_text().splitlines():
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append(stripped)
    if not lines or not lines[0].lower().startswith("dims:"):
        raise ValueError(f"{path}: first line must be 'dims: d1 d2 ...'")
    try:
        dims = tuple(int(tok) for tok in lines[0].split(":", 1)[1].split())
    except ValueError as exc:
        raise ValueError(f"{path}: malformed dims header") from exc
    if not dims:
        raise ValueError(f"{path}: dims header lists no factors")
    total = math.prod(dims)
    body = lines[1:]
    if len(body) != total:
        raise ValueError(f"{path}: expected {total} amplitude lines, found {len(body)}")
    amps = np.empty(total, dtype=complex)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: line {i + 2}: expected 're im'")
        try:
            amps[i] = complex(float(parts[0]), float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"{path}: line {i + 2}: not numeric") from exc
    nrm = float(np.linalg.norm(amps))
    if abs(nrm - 1.0) > 1e-6:
        raise ValueError(f"{path}: state norm {nrm:.8f} too far from 1")
    return Ket(amps / nrm, dims, normalized=True)


def write_amplitude_file(path: str | Path, state: Ket) -> None:
    lines = ["dims: " + " ".join(str(d) for d in state.factor_dims)]
    for a in state.amps:
        lines.append(f"{float(a.real)!r} {float(a.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_input(args) -> tuple[Ket, str, int]:
    if args.input == "plus":
        if args.qubits is None:
            raise ValueError("--qubits is required when --input is 'plus'")
        return plus_state(args.qubits), "plus", args.qubits
    state = load_amplitude_file(args.input)
    if any(d != 2 for d in state.factor_dims):
        raise ValueError(f"{args.input}: register factors must all be qubits")
    n = len(state.factor_dims)
    if args.qubits is not None and args.qubits != n:
        raise ValueError(f"--qubits {args.qubits} disagrees with file register of {n} qubits")
    return state, str(args.input), n


def _weights_display(dec: states.DickeDecomposition) -> str:
    ratios = states.squared_weight_ratios(dec)
    if ratios is not None:
        return " ".join(f"{k}:{v}" for k, v in ratios.items())
    return " ".join(f"{k}:{fmt_float(c)}" for k, c in sorted(dec.coeffs.items()))


def _outcome_payload(rec: OutcomeRecord) -> dict:
    payload: dict = {
        "outcome": rec.outcome_label,
        "parity": rec.parity,
        "probability": fmt_float(rec.probability),
        "probability_exact": None
        if rec.probability_exact is None
        else fmt_fraction(rec.probability_exact),
        "zero_probability": rec.zero_probability,
    }
    if rec.post_state is None:
        payload.update(
            {"classification": None, "up_to_bitflip": None, "dicke_coeffs": None, "residual": None}
        )
        return payload
    dec = states.dicke_decompose(rec.post_state)
    ratios = states.squared_weight_ratios(dec)
    payload.update(
        {
            "classification": rec.classification.label() if rec.classification else None,
            "up_to_bitflip": rec.classification.up_to_bitflip if rec.classification else None,
            "dicke_coeffs": {str(k): fmt_float(c) for k, c in sorted(dec.coeffs.items())},
            "dicke_weights": None if ratios is None else {str(k): v for k, v in ratios.items()},
            "residual": fmt_float(dec.residual),
        }
    )
    return payload


def cmd_simulate(args) -> int:
    state, descriptor, n = _resolve_input(args)
    config = ModuleConfig(n=n, d=args.ancilla_dim, coupling=CouplingKind(args.coupling))
    records = sorted(
        run_module(state, config), key=lambda r: (r.parity, r.outcome_label)
    )
    if args.json:
        payload = {
            "schema": SCHEMA_VERSION,
            "command": "simulate",
            "config": {
                "qubits": n,
                "ancilla_dim": args.ancilla_dim,
                "coupling": args.coupling,
                "input": descriptor,
                "measurement_basis": config.measurement_basis.value,
            },
            "outcomes": [_outcome_payload(r) for r in records],
        }
        _emit(canonical_json(with_checksum(payload)) + "\n", args.out)
        return 0
    lines = [
        f"parity module: n={n} qubits, d={args.ancilla_dim} ancilla, {args.coupling} coupling",
        f"input: {descriptor}; measurement basis: {config.measurement_basis.value}",
        f"{'parity':>6}  {'outcome':>7}  {'p (exact)':>10}  {'p (float)':<16}  "
        f"{'classification':<24}  dicke k:weight",
    ]
    for rec in records:
        exact = "-" if rec.probability_exact is None else fmt_fraction(rec.probability_exact)
        if rec.post_state is None:
            label, weights = "(zero probability)", "-"
        else:
            label = rec.classification.label()
            if rec.classification.up_to_bitflip:
                label += " (up to bitflip)"
            weights = _weights_display(states.dicke_decompose(rec.post_state))
        lines.append(
            f"{rec.parity:>6}  {rec.outcome_label:>7}  {exact:>10}  "
            f"{fmt_float(rec.probability):<16}  {label:<24}  {weights}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _parse_phases(text: str) -> solver.EigenphaseSpec:
    if text.startswith("roots:"):
        try:
            d = int(text.split(":", 1)[1])
        except ValueError as exc:
            raise ValueError(f"bad shorthand {text!r}; expected roots:D") from exc
        return solver.roots_of_unity_spec(d)
    try:
        phases = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValueError(f"could not parse phase list {text!r}") from exc
    return solver.EigenphaseSpec(phases)


def cmd_solve(args) -> int:
    spec = _parse_phases(args.phases)
    solution = solver.solve_amplitudes(spec)
    gram_dev = None
    if solution.feasible:
        seed = solver.admissible_state(spec, [0.0] * spec.d)
        drive = Operator(np.diag(np.exp(1j * np.array(spec.phases))), unitary=True)
        report = solver.check_orbit(drive, seed, solution.structure.s)
        gram_dev = report.max_deviation
    if args.json:
        payload = {
            "schema": SCHEMA_VERSION,
            "command": "solve",
            "phases": [fmt_float(p) for p in spec.phases],
            "feasible": solution.feasible,
            "distinct_eigenvalues": solution.structure.s,
            "multiplicities": list(solution.structure.multiplicities),
            "phase_offset": fmt_float(solution.canonical_phase_offset),
            "squared_amps": None
            if solution.squared_amps is None
            else [fmt_float(q) for q in solution.squared_amps],
            "eigenspace_constraints": [
                {"indices": list(grp), "weight": fmt_float(wt)}
                for grp, wt in solution.eigenspace_constraints
            ],
            "gram_deviation": None if gram_dev is None else fmt_float(gram_dev),
        }
        _emit(canonical_json(with_checksum(payload)) + "\n", args.out)
        return 0 if solution.feasible else 1
    lines = [
        "eigenphases: " + ", ".join(fmt_float(p) for p in spec.phases),
        f"distinct eigenvalues: {solution.structure.s} "
        f"(multiplicities {', '.join(map(str, solution.structure.multiplicities))})",
        f"feasible: {'yes' if solution.feasible else 'no'}",
    ]
    if solution.feasible:
        lines.append(
            "squared magnitudes: " + ", ".join(fmt_float(q) for q in solution.squared_amps)
        )
        for grp, wt in solution.eigenspace_constraints:
            lines.append(
                f"eigenspace {grp}: total weight {fmt_float(wt)}"
            )
        lines.append(f"phase offset: {fmt_float(solution.canonical_phase_offset)}")
        lines.append(f"orbit Gram deviation: {fmt_float(gram_dev)}")
    else:
        lines.append(
            "no state yields an orthonormal orbit: the distinct eigenvalues are "
            "not a rotated set of roots of unity"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if solution.feasible else 1


def cmd_verify(args) -> int:
    checks = verify.run_suite(args.suite)
    lines = []
    for check in checks:
        if check.passed:
            lines.append(f"PASS  {check.name}")
        else:
            lines.append(f"FAIL  {check.name}: {check.detail()}")
    failed = sum(not c.passed for c in checks)
    lines.append(
        f"{len(checks) - failed}/{len(checks)} checks passed"
        + (f", {failed} FAILED" if failed else "")
    )
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if failed else 0


def _table_dicke(max_n: int) -> tuple[list[str], list[dict]]:
    lines = [
        f"{'n':>3} {'parity':>6}  {'p (exact)':>12} {'p (float)':<15} {'dual-pair p':>12}  note"
    ]
    rows = []
    for n in range(2, max_n + 1):
        for k in range(n):
            p = Fraction(sum(math.comb(n, j) for j in range(k, n + 1, n)), 1 << n)
            partner = (n - k) % n
            note = ""
            pair: Fraction | None = None
            if k <= partner:
                if k == partner or 2 * k == n:
                    pair = p
                    note = "self-dual class: single outcome; doubling would overcount"
                else:
                    pair = p + Fraction(
                        sum(math.comb(n, j) for j in range(partner, n + 1, n)), 1 << n
                    )
            rows.append(
                {
                    "n": n,
                    "parity": k,
                    "probability_exact": fmt_fraction(p),
                    "probability": fmt_float(float(p)),
                    "dual_pair": None if pair is None else fmt_fraction(pair),
                    "self_dual": 2 * k == n or k == partner,
                }
            )
            lines.append(
                f"{n:>3} {k:>6}  {fmt_fraction(p):>12} {fmt_float(float(p)):<15} "
                f"{'-' if pair is None else fmt_fraction(pair):>12}  {note}"
            )
    return lines, rows


def _table_w_compare(max_n: int) -> tuple[list[str], list[dict]]:
    lines = [
        f"{'n':>3}  {'p(W_n)':>10} {'baseline':>14} {'gain':>12} {'bound 2^(n-2)':>14}  ok"
    ]
    rows = []
    for n in range(3, max_n + 1):
        p_w = Fraction(n, 1 << (n - 1))
        baseline = Fraction(n, 1 << (2 * n - 2)) if n % 2 else Fraction(n, 1 << (2 * n - 3))
        gain = p_w / baseline
        bound = Fraction(1 << (n - 2))
        ok = gain >= bound
        rows.append(
            {
                "n": n,
                "p_w": fmt_fraction(p_w),
                "baseline": fmt_fraction(baseline),
                "gain": fmt_fraction(gain),
                "bound": fmt_fraction(bound),
                "ok": ok,
            }
        )
        lines.append(
            f"{n:>3}  {fmt_fraction(p_w):>10} {fmt_fraction(baseline):>14} "
            f"{fmt_fraction(gain):>12} {fmt_fraction(bound):>14}  {'yes' if ok else 'NO'}"
        )
    return lines, rows


def _table_halfdicke(max_n: int) -> tuple[list[str], list[dict]]:
    lines = [
        f"{'k':>3} {'n=2k':>5}  {'p (exact)':>14} {'p (float)':<15} {'1/sqrt(pi k)':<15} "
        f"{'rel err':<12} {'pair form 2/sqrt(pi k)':<22}"
    ]
    rows = []
    for k in range(1, max_n // 2 + 1):
        n = 2 * k
        p = Fraction(math.comb(n, k), 1 << n)
        asym = 1.0 / math.sqrt(math.pi * k)
        rel = abs(float(p) - asym) / asym
        rows.append(
            {
                "k": k,
                "n": n,
                "probability_exact": fmt_fraction(p),
                "probability": fmt_float(float(p)),
                "asymptote": fmt_float(asym),
                "relative_error": fmt_float(rel),
                "pair_form": fmt_float(2 * asym),
                "self_dual": True,
            }
        )
        lines.append(
            f"{k:>3} {n:>5}  {fmt_fraction(p):>14} {fmt_float(float(p)):<15} "
            f"{fmt_float(asym):<15} {fmt_float(rel):<12} {fmt_float(2 * asym):<22}"
        )
    lines.append(
        "note: the half-filled branch is self-dual (k = n-k), a single outcome; "
        "the dual-pair aggregate form 2/sqrt(pi k) double-counts it and "
        "overstates this probability by a factor of 2."
    )
    return lines, rows


_TABLES = {
    "dicke": _table_dicke,
    "w-compare": _table_w_compare,
    "halfdicke-scaling": _table_halfdicke,
}


def cmd_table(args) -> int:
    if args.max_n < 2 or args.max_n > 20:
        raise ValueError(f"--max-n must lie in [2, 20], got {args.max_n}")
    lines, rows = _TABLES[args.family](args.max_n)
    if args.json:
        payload = {
            "schema": SCHEMA_VERSION,
            "command": "table",
            "family": args.family,
            "max_n": args.max_n,
            "rows": rows,
        }
        _emit(canonical_json(with_checksum(payload)) + "\n", args.out)
        return 0
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_sample(args) -> int:
    if args.shots < 0:
        raise ValueError(f"--shots must be nonnegative, got {args.shots}")
    state, _, n = _resolve_input(args)
    config = ModuleConfig(n=n, d=args.ancilla_dim, coupling=CouplingKind(args.coupling))
    records = run_module(state, config, classify_states=False)
    probs = np.array([r.probability for r in records])
    probs = probs / probs.sum()
    rng = np.random.default_rng(args.seed)
    draws = rng.choice(len(records), size=args.shots, p=probs)
    text = "".join(f"{records[i].parity}\n" for i in draws)
    _emit(text, args.out)
    return 0


def _add_register_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--qubits", "-n", type=int, default=None, help="register size")
    sub.add_argument("--ancilla-dim", "-d", type=int, required=True, help="ancilla dimension")
    sub.add_argument(
        "--coupling", choices=[c.value for c in CouplingKind], default="phase"
    )
    sub.add_argument(
        "--input",
        default="plus",
        help="'plus' for |+>^n or a path to an amplitude file",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qparity",
        description="simulate qudit-ancilla parity modules and solve for admissible drives",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one module and report every heralded branch")
    _add_register_flags(sim)
    sim.add_argument("--json", action="store_true")
    sim.add_argument("--out", default=None, help="write the report to a file")
    sim.set_defaults(handler=cmd_simulate)

    slv = sub.add_parser("solve", help="decide feasibility of an eigenphase spec")
    slv.add_argument(
        "--phases",
        required=True,
        help="comma-separated eigenphases in radians, or roots:D",
    )
    slv.add_argument("--json", action="store_true")
    slv.add_argument("--out", default=None)
    slv.set_defaults(handler=cmd_solve)

    ver = sub.add_parser("verify", help="run a named self-check suite")
    ver.add_argument(
        "--suite",
        required=True,
        choices=sorted(verify.SUITES) + ["all"],
    )
    ver.add_argument("--out", default=None)
    ver.set_defaults(handler=cmd_verify)

    tab = sub.add_parser("table", help="print closed-form probability tables")
    tab.add_argument("--family", required=True, choices=sorted(_TABLES))
    tab.add_argument("--max-n", type=int, default=12)
    tab.add_argument("--json", action="store_true")
    tab.add_argument("--out", default=None)
    tab.set_defaults(handler=cmd_table)

    smp = sub.add_parser("sample", help="draw heralded outcomes from the module")
    _add_register_flags(smp)
    smp.add_argument("--shots", type=int, required=True)
    smp.add_argument("--seed", type=int, default=0)
    smp.add_argument("--out", default=None)
    smp.set_defaults(handler=cmd_sample)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code in (0, None):
            return 0
        return 2
    try:
        return args.handler(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
