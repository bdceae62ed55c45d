"""Command-line entry point: `fncalc verify | bracket | interior | lie | selftest`."""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import List, Optional

import numpy as np

from .calculus import Connection, fn_bracket, interior, lie
from .errors import FNCalcError
from .forms import FormKernel, VectorForm, tangent_value
from .suites import SuiteConfig, run_suite, suite_names

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# default selftest: one run per suite plus its mutated run
SELFTEST_PLAN = [SuiteConfig(name) for name in suite_names()]

# extended grid, sized like the acceptance runs
EXTENDED_PLAN = (
    [SuiteConfig("general-jacobi", dim=m, trials=1000) for m in (1, 2, 3, 4)]
    + [SuiteConfig("antisymmetry", dim=m, p=p, q=q, trials=100) for m in (2, 3) for p, q in ((0, 0), (0, 1), (1, 1), (1, 2), (2, 2))]
    + [SuiteConfig("graded-jacobi", dim=m, p=p, q=q, r=r, trials=25) for m in (2, 3) for p, q, r in ((0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, 2))]
    + [SuiteConfig("lie-decomposition", dim=m, p=p, q=q, trials=20) for m in (2, 3) for p, q in ((0, 0), (0, 1), (1, 1), (1, 2), (2, 2))]
    + [SuiteConfig(name, trials=100) for name in ("fn-naturality", "interior-naturality", "lie-naturality")]
    + [SuiteConfig("oracle-fn", dim=max(2, p + q), p=p, q=q, trials=100) for p, q in ((0, 0), (0, 1), (1, 1), (1, 2), (2, 2))]
)


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_form(path: str) -> VectorForm:
    try:
        return VectorForm(FormKernel.from_json(_read_json(path)))
    except (KeyError, TypeError, ValueError, FNCalcError) as exc:
        raise UsageError(f"malformed form file {path}: {exc}") from exc


def _load_connection(path: Optional[str], dim: int) -> Connection:
    if path is None:
        return Connection.flat(dim)
    try:
        nabla = Connection.from_json(_read_json(path))
    except (KeyError, TypeError, ValueError, FNCalcError) as exc:
        raise UsageError(f"malformed connection file {path}: {exc}") from exc
    if nabla.dim != dim:
        raise UsageError(f"connection on R^{nabla.dim} but forms on R^{dim}")
    return nabla


def _parse_point(text: str, dim: int) -> np.ndarray:
    try:
        x = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad point {text!r}") from exc
    if x.size != dim:
        raise UsageError(f"point has {x.size} coordinates, forms live on R^{dim}")
    return x


def _directions(path: Optional[str], n: int, dim: int) -> List[List[float]]:
    if path is None:
        if n > dim:
            raise UsageError(f"degree {n} exceeds dimension {dim}; supply --dirs")
        return np.eye(dim)[:n].tolist()
    data = _read_json(path)
    if not isinstance(data, list) or len(data) != n or any(not isinstance(v, list) or len(v) != dim for v in data):
        raise UsageError(f"--dirs must hold {n} vectors of length {dim}")
    return [[float(c) for c in v] for v in data]


def _compute(args) -> int:
    K, L = _load_form(args.left), _load_form(args.right)
    if K.dim != L.dim:
        raise UsageError("left and right forms live in different dimensions")
    try:
        if args.command == "bracket":
            E = fn_bracket(K, L)
        elif args.command == "interior":
            E = interior(K, L)
        else:
            E = lie(K, L, _load_connection(args.connection, K.dim))
    except FNCalcError as exc:
        raise UsageError(str(exc)) from exc
    x = _parse_point(args.point, K.dim)
    dirs = _directions(args.dirs, E.degree, K.dim)
    t = tangent_value(E, x, dirs)
    result = {
        "operator": args.command,
        "degree": E.degree,
        "point": x.tolist(),
        "directions": dirs,
        "base": t.base.tolist(),
        "direction": t.direction.tolist(),
    }
    text = json.dumps(result, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


def _verify(args) -> int:
    cfg = SuiteConfig(
        args.suite,
        dim=args.dim,
        p=args.p,
        q=args.q,
        r=args.r,
        trials=args.trials,
        seed=args.seed,
        tol=args.tol,
        mutate=args.mutate,
    )
    try:
        report = run_suite(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps(report.to_json(), indent=2) if args.json else report.line())
    return EXIT_OK if report.passed else EXIT_FAIL


def selftest(seed: int = 0, extended: bool = False, log=None):
    """Run the plan and its mutations; returns (json-ready report, all good)."""
    plan = SELFTEST_PLAN + (EXTENDED_PLAN if extended else [])
    suites, mutations = [], []
    good = True
    for cfg in plan:
        cfg = SuiteConfig(**{**cfg.__dict__, "seed": seed})
        report = run_suite(cfg)
        suites.append(report.to_json())
        good &= report.passed
        if log:
            log(report.line())
    for cfg in SELFTEST_PLAN:
        cfg = SuiteConfig(**{**cfg.__dict__, "seed": seed, "mutate": True})
        report = run_suite(cfg)
        detected = not report.passed
        mutations.append({"suite": cfg.suite, "detected": detected})
        good &= detected
        if log:
            log(f"mutation {cfg.suite:<20} {'detected' if detected else 'MISSED'}  ({report.seconds:.2f}s)")
    return {"seed": seed, "extended": extended, "suites": suites, "mutations": mutations, "pass": bool(good)}, good


def _selftest(args) -> int:
    start = time.perf_counter()
    log = None if args.json else print
    report, good = selftest(args.seed, args.extended, log)
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text)
    else:
        print(f"selftest {'PASS' if good else 'FAIL'} in {time.perf_counter() - start:.1f}s")
    return EXIT_OK if good else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fncalc", description="Synthetic Froelicher-Nijenhuis calculus on R^m.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one property suite")
    v.add_argument("suite", choices=suite_names())
    v.add_argument("--dim", type=int)
    v.add_argument("--p", type=int)
    v.add_argument("--q", type=int)
    v.add_argument("--r", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float)
    v.add_argument("--json", action="store_true", help="print the JSON report")
    v.add_argument("--mutate", action="store_true", help="plant the suite's bug; the run should FAIL")
    v.set_defaults(func=_verify)

    for name, text in (("bracket", "FN bracket [K, L]"), ("interior", "interior derivation i_K L"), ("lie", "Lie derivation L_K L")):
        c = sub.add_parser(name, help=f"evaluate the {text}")
        c.add_argument("--left", required=True, help="form file for K")
        c.add_argument("--right", required=True, help="form file for L")
        c.add_argument("--point", required=True, help='base point, e.g. "1,0.5"')
        c.add_argument("--dirs", help="JSON file with one direction vector per slot (default: coordinate axes)")
        c.add_argument("--out", help="also write the result to this file")
        if name == "lie":
            c.add_argument("--connection", help="connection file (default: flat)")
        c.set_defaults(func=_compute)

    s = sub.add_parser("selftest", help="run every suite and check that planted bugs are caught")
    s.add_argument("--extended", action="store_true", help="add the acceptance-size grid")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.add_argument("--out", help="write the JSON report to this file")
    s.set_defaults(func=_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fncalc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
