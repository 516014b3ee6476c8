"""Batch front end: solve, diagnose, and classify eigenproblem files.

Problem files are JSON:

    {
      "lambda0": "2*x", "s0": "1 - E", "parameter": "E",
      "x0": 0.0, "order": 80, "n_max": 40,
      "search": {"e_min": 0.0, "e_max": 12.0, "grid": 101, "tol": 1e-10},
      "classify": {"declared_power_law": {"a": 2, "sigma": 1, "b": -1, "tau": 0}}
    }

Output is deterministic JSON (sorted keys, shortest round-trip floats,
non-finite values as strings) or CSV of the command's main table.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import enum
import io
import json
import math
import sys
import warnings
from typing import Any, Optional, Sequence

import numpy as np

from . import analysis
from .aim import ProblemSpec, find_eigenvalues
from .cf import cf_approximants, cf_determinants, cf_equiv_unit, detect_termination, pq_iterate
from .errors import (
    AimError,
    CenterMismatch,
    ParseOrEvalError,
    ValidationError,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

# Fixed policy for the diagnose convergence verdict; the thresholds are part
# of the output contract, not tunables.
SUM_THRESHOLD = 50.0
CAUCHY_WINDOW = 10


def _jsonable(obj: Any) -> Any:
    """Reduce report objects to JSON-safe primitives, deterministically."""
    if isinstance(obj, enum.Enum):
        return obj.value
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: _jsonable(getattr(obj, f.name))
            for f in dataclasses.fields(obj)
        }
    if isinstance(obj, complex):
        return {"im": _jsonable(obj.imag), "re": _jsonable(obj.real)}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    return obj


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _load_problem(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"problem file is not valid JSON: {exc}") from exc
    _require(isinstance(raw, dict), "problem file must be a JSON object")
    for key in ("lambda0", "s0", "parameter", "x0", "order", "n_max"):
        _require(key in raw, f"problem file missing required key '{key}'")
    _require(isinstance(raw["lambda0"], str), "'lambda0' must be a string expression")
    _require(isinstance(raw["s0"], str), "'s0' must be a string expression")
    _require(isinstance(raw["parameter"], str), "'parameter' must be a string")
    search = raw.get("search")
    if search is not None:
        _require(isinstance(search, dict), "'search' must be an object")
        for key in ("e_min", "e_max"):
            _require(key in search, f"'search' missing '{key}'")
        _require(
            float(search["e_min"]) < float(search["e_max"]),
            "search requires e_min < e_max",
        )
    return raw


def _build_spec(raw: dict, args: argparse.Namespace) -> ProblemSpec:
    x0 = args.x0 if args.x0 is not None else float(raw["x0"])
    order = args.order if args.order is not None else int(raw["order"])
    n_max = args.n if args.n is not None else int(raw["n_max"])
    return ProblemSpec.from_strings(
        raw["lambda0"],
        raw["s0"],
        raw["parameter"],
        x0=x0,
        order=order,
        n_max=n_max,
    )


def _inputs_echo(raw: dict, spec: ProblemSpec, args: argparse.Namespace) -> dict:
    echo = {
        "lambda0": raw["lambda0"],
        "s0": raw["s0"],
        "parameter": raw["parameter"],
        "x0": spec.x0,
        "order": spec.order,
        "n_max": spec.n_max,
    }
    if args.param_value is not None:
        echo["param_value"] = args.param_value
    return echo


def _warning_strings(caught: list[warnings.WarningMessage]) -> list[str]:
    return [f"{w.category.__name__}: {w.message}" for w in caught]


def _run_solve(raw: dict, spec: ProblemSpec, args: argparse.Namespace) -> dict:
    search = raw.get("search")
    _require(search is not None, "solve requires a 'search' block")
    e_min = float(search["e_min"])
    e_max = float(search["e_max"])
    grid = args.grid if args.grid is not None else int(search.get("grid", 101))
    tol = args.tol if args.tol is not None else float(search.get("tol", 1e-10))
    warn_list: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        roots = find_eigenvalues(
            spec, e_min, e_max, grid, n=spec.n_max, tol=tol
        )
    warn_list.extend(_warning_strings(caught))
    if not roots:
        warn_list.append(
            f"no eigenvalues found in [{e_min:g}, {e_max:g}] at depth {spec.n_max}"
        )
    outputs = {
        "count": len(roots),
        "eigenvalues": [
            {"n_used": r.n_used, "residual": r.residual, "value": r.value}
            for r in roots
        ],
        "search": {"e_max": e_max, "e_min": e_min, "grid": grid, "tol": tol},
    }
    return {"outputs": outputs, "warnings": warn_list}


def _run_diagnose(raw: dict, spec: ProblemSpec, args: argparse.Namespace) -> dict:
    _require(
        args.param_value is not None,
        "diagnose requires --param-value for the fixed parameter",
    )
    warn_list: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pq = pq_iterate(spec, args.param_value)
        termination = detect_termination(pq)
        pvals = [float(s.at_center) for s in pq.p]
        qvals = [float(s.at_center) for s in pq.q]
        if pq.stop_level is not None:
            warn_list.append(
                f"ladder stopped at level {pq.stop_level} ({pq.stop_reason}); "
                "table is partial"
            )
        state = cf_approximants(pvals, qvals)
        cf_determinants(state)
        table = []
        for n in range(state.depth + 1):
            dc = state.C[n] - state.C[n - 1] if n >= 1 else math.nan
            table.append(
                {
                    "C": float(state.C[n]),
                    "dC": float(dc),
                    "n": n,
                    "p": pvals[n],
                    "q": qvals[n],
                }
            )
        verdict = None
        bound_violations = None
        try:
            ptilde = cf_equiv_unit(pvals, qvals)
        except AimError as exc:
            warn_list.append(f"unit-form diagnostics skipped: {exc}")
            ptilde = None
        if ptilde is not None and all(p > 0.0 for p in ptilde):
            report = analysis.stern_seidel(ptilde, SUM_THRESHOLD, CAUCHY_WINDOW)
            verdict = _jsonable(report)
            if all(p >= 1.0 for p in ptilde):
                unit_state = cf_approximants(ptilde, [1.0] * len(ptilde))
                rows = analysis.bound_check(unit_state)
                bound_violations = sum(1 for *_, ok in rows if not ok)
        elif ptilde is not None:
            warn_list.append(
                "unit-form coefficients are not all positive; convergence "
                "verdict skipped"
            )
    warn_list.extend(_warning_strings(caught))
    det_ok = not any("DeterminantMismatchWarning" in w for w in warn_list)
    outputs = {
        "bound_violations": bound_violations,
        "convergence": verdict,
        "determinant_ok": det_ok,
        "table": table,
        "termination_level": termination,
    }
    return {"outputs": outputs, "warnings": warn_list}


def _classify_sequences(
    raw: dict, spec: Optional[ProblemSpec], args: argparse.Namespace
) -> tuple[list[float], list[float], Optional[dict]]:
    block = raw.get("classify") or {}
    _require(isinstance(block, dict), "'classify' must be an object")
    declared = None
    if "declared_power_law" in block:
        declared = dict(block["declared_power_law"])
    elif "declared_ba_coeffs" in block:
        declared = dict(block["declared_ba_coeffs"])
    if "pvals" in block or "qvals" in block:
        _require(
            "pvals" in block and "qvals" in block,
            "raw sequences need both 'pvals' and 'qvals'",
        )
        pvals = [float(v) for v in block["pvals"]]
        qvals = [float(v) for v in block["qvals"]]
        return pvals, qvals, declared
    _require(
        args.param_value is not None,
        "classify requires --param-value unless raw sequences are given",
    )
    assert spec is not None
    pq = pq_iterate(spec, args.param_value)
    pvals = [float(s.at_center) for s in pq.p]
    qvals = [float(s.at_center) for s in pq.q]
    return pvals, qvals, declared


def _run_classify(raw: dict, spec: ProblemSpec, args: argparse.Namespace) -> dict:
    warn_list: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pvals, qvals, declared = _classify_sequences(raw, spec, args)
        report = analysis.classify(pvals, qvals, declared=declared, seed=args.seed)
        pincherle = analysis.pincherle_check(pvals, qvals)
    warn_list.extend(_warning_strings(caught))
    outputs = {
        "classification": _jsonable(report),
        "pincherle": _jsonable(pincherle),
    }
    return {"outputs": outputs, "warnings": warn_list}


def _render_csv(record: dict) -> str:
    """Flatten the command's main table; sweep runs gain a leading x0 column."""
    runs = record.get("runs", [record])
    sweeping = "runs" in record
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    command = record["command"]
    if command == "solve":
        header = ["value", "residual", "n_used"]
        writer.writerow((["x0"] if sweeping else []) + header)
        for run in runs:
            for row in run["outputs"]["eigenvalues"]:
                base = [row["value"], row["residual"], row["n_used"]]
                writer.writerow(
                    ([run["inputs"]["x0"]] if sweeping else []) + base
                )
    elif command == "diagnose":
        header = ["n", "p", "q", "C", "dC"]
        writer.writerow((["x0"] if sweeping else []) + header)
        for run in runs:
            for row in run["outputs"]["table"]:
                base = [row["n"], row["p"], row["q"], row["C"], row["dC"]]
                writer.writerow(
                    ([run["inputs"]["x0"]] if sweeping else []) + base
                )
    else:
        writer.writerow((["x0"] if sweeping else []) + ["key", "value"])
        for run in runs:
            flat = _flatten(run["outputs"], "")
            for key in sorted(flat):
                writer.writerow(
                    ([run["inputs"]["x0"]] if sweeping else []) + [key, flat[key]]
                )
    return out.getvalue()


def _flatten(obj: Any, prefix: str) -> dict[str, Any]:
    flat: dict[str, Any] = {}
    if isinstance(obj, dict):
        for k, v in obj.items():
            flat.update(_flatten(v, f"{prefix}{k}."))
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            flat.update(_flatten(v, f"{prefix}{i}."))
    else:
        flat[prefix.rstrip(".")] = obj
    return flat


def _parse_sweep(text: str) -> list[float]:
    parts = text.split(":")
    _require(len(parts) == 3, "--sweep-x0 expects 'start:stop:steps'")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"bad --sweep-x0 value: {exc}") from exc
    _require(steps >= 1, "--sweep-x0 steps must be >= 1")
    return [float(v) for v in np.linspace(start, stop, steps)]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aimcf",
        description="Eigenproblem solver and recurrence diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "scan the parameter range for eigenvalues"),
        ("diagnose", "tabulate ladder coefficients and approximants at fixed parameter"),
        ("classify", "label the recurrence asymptotics and check minimality"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("problem_file", help="JSON problem description")
        p.add_argument("--order", type=int, default=None, help="series truncation order")
        p.add_argument("--n", type=int, default=None, help="iteration depth")
        p.add_argument("--x0", type=float, default=None, help="expansion center")
        p.add_argument(
            "--param-value", type=float, default=None, help="fixed parameter value"
        )
        p.add_argument("--grid", type=int, default=None, help="scan grid points")
        p.add_argument("--tol", type=float, default=None, help="root tolerance")
        p.add_argument(
            "--format", choices=("json", "csv"), default="json", help="output format"
        )
        p.add_argument("--seed", type=int, default=0, help="seed for numeric probes")
        p.add_argument(
            "--sweep-x0",
            default=None,
            metavar="A:B:STEPS",
            help="repeat the command over evenly spaced centers",
        )
    return parser


_RUNNERS = {
    "solve": _run_solve,
    "diagnose": _run_diagnose,
    "classify": _run_classify,
}


def _single_record(raw: dict, args: argparse.Namespace) -> dict:
    spec = _build_spec(raw, args)
    body = _RUNNERS[args.command](raw, spec, args)
    return {
        "command": args.command,
        "inputs": _inputs_echo(raw, spec, args),
        "outputs": body["outputs"],
        "seed": args.seed,
        "warnings": body["warnings"],
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        raw = _load_problem(args.problem_file)
        if args.sweep_x0 is not None:
            records = []
            for x0 in _parse_sweep(args.sweep_x0):
                sub_args = argparse.Namespace(**vars(args))
                sub_args.x0 = x0
                records.append(_single_record(raw, sub_args))
            record: dict = {
                "command": args.command,
                "runs": records,
                "seed": args.seed,
                "sweep_parameter": "x0",
            }
        else:
            record = _single_record(raw, args)
    except (ValidationError, ParseOrEvalError, CenterMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AimError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.format == "csv":
        sys.stdout.write(_render_csv(_jsonable(record)))
    else:
        print(json.dumps(_jsonable(record), sort_keys=True, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
