"""Command-line front end: ``unext {emin,sweep,verify,state}``.

Exit codes: 0 success, 1 input error, 2 solver failure (``verify`` also
returns 2 when any suite fails). ``UNEXT_LOG`` selects solver logging:
``quiet`` (default), ``info`` or ``debug``.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .entropy import coherent_information
from .linalg import Part, SystemDims
from .states import (
    DensityOperator,
    doubly_erased_private,
    erased_state,
    isotropic_state,
    max_entangled,
    private_state,
    PrivateStateSpec,
    werner_state,
)
from .unextendible import DimensionCapError, SolverError, doubly_erased_bound, emin
from .verify import SUITE_IDS, reports_to_json, run_suite

__all__ = [
    "StateFileError",
    "SWEEP_HEADER",
    "state_to_json",
    "state_from_json",
    "read_state_file",
    "write_state_file",
    "fixture_path",
    "build_state",
    "sweep_rows",
    "main",
]

EXIT_OK, EXIT_INPUT, EXIT_SOLVER = 0, 1, 2

SWEEP_HEADER = ("family", "param_name", "param_value", "d", "k", "emin_bits",
                "doubly_erased_bound_bits", "coherent_info_bits", "is_2ext_sup",
                "solver_iters", "wall_ms")

FAMILIES = ("erased", "doubly-erased", "werner", "isotropic")

log = logging.getLogger(__name__)


class StateFileError(ValueError):
    """Malformed or invalid state file."""


# -- state files -------------------------------------------------------------

def state_to_json(rho: DensityOperator, tol: float = 1e-8) -> dict:
    g = rho.dims.permuted(rho.dims.grouping_perm())
    a = [p for p in g.parts if p.side == "A"]
    b = [p for p in g.parts if p.side == "B"]
    m = rho.grouped()
    return {
        "dims": {"a": [p.dim for p in a], "b": [p.dim for p in b],
                 "erasure_extended": [p.erasure_extended for p in a + b]},
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in m],
        "tol": tol,
    }


def state_from_json(doc) -> DensityOperator:
    if not isinstance(doc, dict):
        raise StateFileError("top level must be an object")
    try:
        dims = doc["dims"]
        a, b = [int(x) for x in dims["a"]], [int(x) for x in dims["b"]]
        raw = doc["matrix"]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFileError(f"missing or malformed field: {exc}") from exc
    if not a or not b or min(a + b) < 1:
        raise StateFileError("dims.a and dims.b must be non-empty lists of positive integers")
    ext = dims.get("erasure_extended", [False] * (len(a) + len(b)))
    if len(ext) != len(a) + len(b):
        raise StateFileError("erasure_extended must have one entry per part")
    tol = float(doc.get("tol", 1e-8))
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise StateFileError(f"matrix entries must be [re, im] pairs: {exc}") from exc
    n = int(np.prod(a + b))
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise StateFileError("matrix must be a square array of [re, im] pairs")
    if arr.shape[:2] != (n, n):
        raise StateFileError(f"matrix is {arr.shape[0]}x{arr.shape[1]} but dims give {n}x{n}")
    m = arr[..., 0] + 1j * arr[..., 1]
    parts = [Part("A", d, bool(e)) for d, e in zip(a, ext[:len(a)])]
    parts += [Part("B", d, bool(e)) for d, e in zip(b, ext[len(a):])]
    try:
        return DensityOperator(m, SystemDims(tuple(parts)), tol=tol)
    except ValueError as exc:
        raise StateFileError(f"not a valid density operator: {exc}") from exc


def read_state_file(path: str | os.PathLike) -> DensityOperator:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"invalid JSON in {path}: {exc}") from exc
    return state_from_json(doc)


def write_state_file(rho: DensityOperator, path: str | os.PathLike, tol: float = 1e-8) -> None:
    Path(path).write_text(json.dumps(state_to_json(rho, tol)) + "\n")


def fixture_path(name: str) -> Path:
    """Path of a bundled state file, e.g. ``phi2.json``."""
    return Path(str(resources.files("unext") / "fixtures" / name))


def build_state(family: str, param: float, d: int = 2, k: int = 2) -> DensityOperator:
    if family == "erased":
        return erased_state(param, d)
    if family == "doubly-erased":
        return doubly_erased_private(max_entangled(k), param)
    if family == "werner":
        return werner_state(param, d)
    if family == "isotropic":
        return isotropic_state(param, d)
    if family == "max-entangled":
        return max_entangled(d)
    if family == "private":
        return private_state(PrivateStateSpec(k=k))
    raise ValueError(f"unknown family {family!r}")


# -- sweep -------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


def _parse_grid(text: str) -> list[float]:
    if "," in text:
        return [float(t) for t in text.split(",") if t.strip()]
    try:
        n = int(text)
    except ValueError:
        return [float(text)]
    if n < 1:
        raise ValueError("grid must have at least one point")
    return [0.5] if n == 1 else list(np.linspace(0.0, 1.0, n))


def sweep_rows(family: str, grid: Sequence[float], d: int = 2, k: int = 2,
               membership_tol: float = 1e-6) -> list[dict]:
    """One row per grid point, in grid order."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    pname = "F" if family == "isotropic" else "p"
    rows = []
    for x in grid:
        t0 = time.perf_counter()
        rho = build_state(family, float(x), d, k)
        rep = emin(rho, with_chain=False)
        rows.append({
            "family": family,
            "param_name": pname,
            "param_value": float(x),
            "d": d if family != "doubly-erased" else None,
            "k": k if family == "doubly-erased" else None,
            "emin_bits": rep.value_bits,
            "doubly_erased_bound_bits": doubly_erased_bound(float(x), k) if family == "doubly-erased" else None,
            "coherent_info_bits": coherent_information(rho),
            "is_2ext_sup": 1.0 - rep.overlap <= membership_tol,
            "solver_iters": rep.iterations,
            "wall_ms": 1e3 * (time.perf_counter() - t0),
        })
    return rows


def write_sweep_csv(rows: Sequence[dict], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        w.writerow([r["family"], r["param_name"]] + [_fmt(r[c]) for c in SWEEP_HEADER[2:]])


# -- commands ----------------------------------------------------------------

def _err(msg: str) -> None:
    print(f"unext: error: {msg}", file=sys.stderr)


def cmd_emin(args) -> int:
    try:
        rho = read_state_file(args.state)
    except StateFileError as exc:
        _err(str(exc))
        return EXIT_INPUT
    try:
        rep = emin(rho, rel_tol=args.tol, max_dim=args.max_dim)
    except DimensionCapError as exc:
        _err(str(exc))
        return EXIT_INPUT
    except SolverError as exc:
        _err(str(exc))
        status = exc.solution.status if exc.solution is not None else "error"
        print(json.dumps({"emin_bits": None, "overlap": None, "status": status}))
        return EXIT_SOLVER
    print(json.dumps({"emin_bits": rep.value_bits, "overlap": rep.overlap, "status": rep.solver_status}))
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        grid = _parse_grid(args.grid)
        rows = sweep_rows(args.family, grid, args.d, args.k)
    except (ValueError, DimensionCapError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    except SolverError as exc:
        _err(str(exc))
        return EXIT_SOLVER
    if args.out in (None, "-"):
        write_sweep_csv(rows, sys.stdout)
        return EXIT_OK
    try:
        with open(args.out, "w", newline="") as fh:
            write_sweep_csv(rows, fh)
    except OSError as exc:
        _err(f"cannot write {args.out}: {exc}")
        return EXIT_INPUT
    return EXIT_OK


def cmd_verify(args) -> int:
    ids = [s.strip() for s in args.suites.split(",") if s.strip()]
    if ids == ["all"]:
        ids = list(SUITE_IDS)
    unknown = [i for i in ids if i not in SUITE_IDS]
    if unknown or not ids:
        _err(f"unknown suite id(s) {unknown}; valid ids: all, {', '.join(SUITE_IDS)}")
        return EXIT_INPUT
    reports = run_suite(ids, seed=args.seed)
    text = reports_to_json(reports, args.seed)
    if args.out in (None, "-"):
        print(text)
    else:
        try:
            Path(args.out).write_text(text + "\n")
        except OSError as exc:
            _err(f"cannot write {args.out}: {exc}")
            return EXIT_INPUT
    for r in reports:
        print(f"{r.theorem_id}: {'pass' if r.passed else 'FAIL'} ({len(r.cases)} cases)", file=sys.stderr)
        for c in r.failures():
            print(f"  failing case {c.descriptor}: measured={c.measured} target={c.target} "
                  f"slack={c.slack}{' ' + c.error if c.error else ''}", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_SOLVER


def cmd_state(args) -> int:
    try:
        rho = build_state(args.family, args.param, args.d, args.k)
        write_state_file(rho, args.out, args.tol)
    except (ValueError, OSError) as exc:
        _err(str(exc))
        return EXIT_INPUT
    return EXIT_OK


def _configure_logging() -> None:
    level = os.environ.get("UNEXT_LOG", "quiet").lower()
    levels = {"quiet": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        _err(f"UNEXT_LOG must be one of {', '.join(levels)}; using quiet")
        level = "quiet"
    logging.basicConfig(level=levels[level], format="%(name)s: %(message)s", stream=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="unext", description="Min-unextendible entanglement toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emin", help="compute min-unextendible entanglement of a state file")
    p.add_argument("state", help="path to a JSON state file")
    p.add_argument("--tol", type=float, default=1e-9, help="relative support cutoff")
    p.add_argument("--max-dim", type=int, default=64, help="cap on the lifted SDP dimension")
    p.set_defaults(func=cmd_emin)

    p = sub.add_parser("sweep", help="sweep a one-parameter family and write CSV")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--d", type=int, default=2, help="local dimension (erased, werner, isotropic)")
    p.add_argument("--k", type=int, default=2, help="key dimension (doubly-erased)")
    p.add_argument("--grid", default="11", help="number of points on [0, 1], a single value, or a comma-separated list")
    p.add_argument("--out", help="output CSV path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run verification suites and write a JSON report")
    p.add_argument("--suites", default="all", help=f"comma-separated ids or 'all' ({', '.join(SUITE_IDS)})")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("state", help="write a state file for a built-in family")
    p.add_argument("--family", required=True, choices=FAMILIES + ("max-entangled", "private"))
    p.add_argument("--param", type=float, default=0.5)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--tol", type=float, default=1e-8, help="tolerance stored in the file")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_state)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    _configure_logging()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
