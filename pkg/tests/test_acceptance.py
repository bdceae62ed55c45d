"""Acceptance criteria 1-10 at their stated tolerances.

Each test records one PASS/FAIL line; the terminal summary hook in conftest
prints them together at the end of the run.
"""

import subprocess
import sys
import time

from fncalc.suites import SuiteConfig, run_suite

PAIR_GRID = [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)]
TRIPLE_GRID = [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 1, 2)]


def _record(record_property, number: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}  ({detail})"
    record_property("acceptance", line)
    print(line)


def _run_all(configs):
    reports = [run_suite(cfg) for cfg in configs]
    for r in reports:
        print(r.line())
    return reports


def _worst(reports) -> float:
    return max(float("inf") if r.max_residual is None else r.max_residual for r in reports)


def test_criterion_01_general_jacobi(record_property):
    start = time.perf_counter()
    reports = _run_all(SuiteConfig("general-jacobi", dim=m, trials=1000, tol=1e-9) for m in (1, 2, 3, 4))
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in reports) and elapsed < 5.0
    _record(record_property, 1, "general Jacobi, 1000 sextuples per m in 1..4", ok, f"max residual {_worst(reports):.2e} <= 1e-9, {elapsed:.2f}s < 5s")
    assert ok


def test_criterion_02_map_strong_difference(record_property):
    reports = _run_all(SuiteConfig("map-strong-diff", dim=m, trials=500, tol=1e-9) for m in (2, 3))
    ok = all(r.passed for r in reports)
    _record(record_property, 2, "maps exchange with strong differences, 500 pairs", ok, f"max residual {_worst(reports):.2e} <= 1e-9")
    assert ok


def test_criterion_03_form_contracts(record_property):
    reports = _run_all(SuiteConfig("form-contracts", dim=3, p=p, trials=500, tol=1e-10) for p in (1, 2))
    mutated = run_suite(SuiteConfig("form-contracts", dim=3, p=2, trials=500, tol=1e-10, mutate=True))
    controls = [r.components["control_homogeneity"] for r in reports] + [r.components["control_alternating"] for r in reports]
    ok = all(r.passed for r in reports) and not mutated.passed and all(c is not None and c > 1e-7 for c in controls)
    _record(
        record_property,
        3,
        "form contracts on 500 kernel forms, negative controls fail",
        ok,
        f"max residual {_worst(reports):.2e} <= 1e-10, smallest control {min(controls):.2e}, planted bug residual {mutated.max_residual:.2e}",
    )
    assert ok


def test_criterion_04_graded_antisymmetry(record_property):
    reports = _run_all(SuiteConfig("antisymmetry", dim=m, p=p, q=q, trials=100, tol=1e-8) for m in (2, 3) for p, q in PAIR_GRID)
    ok = all(r.passed for r in reports)
    _record(record_property, 4, "graded antisymmetry, 10 cells x 100 trials", ok, f"max residual {_worst(reports):.2e} <= 1e-8")
    assert ok


def test_criterion_05_graded_jacobi(record_property):
    grid = [SuiteConfig("graded-jacobi", dim=m, p=p, q=q, r=r, trials=25, tol=1e-7) for m in (2, 3) for p, q, r in TRIPLE_GRID]
    # extra cell where the (1,1,2) bracket is not forced to vanish by dimension
    grid.append(SuiteConfig("graded-jacobi", dim=4, p=1, q=1, r=2, trials=25, tol=1e-7))
    reports = _run_all(grid)
    heavy = [r for r in reports if (r.params["p"], r.params["q"], r.params["r"]) == (1, 1, 2)]
    slowest = max(r.seconds for r in heavy)
    steps = ("phi_identity_1", "phi_identity_2", "phi_identity_3", "assoc", "phi_general_jacobi")
    step_worst = max(r.components[k] for r in reports for k in steps)
    ok = all(r.passed for r in reports) and slowest < 120.0 and step_worst <= 1e-7
    _record(
        record_property,
        5,
        "graded Jacobi with intermediate and alternation identities, 25 trials per cell",
        ok,
        f"max residual {_worst(reports):.2e} <= 1e-7, proof steps {step_worst:.2e}, slowest (1,1,2) cell {slowest:.1f}s < 120s",
    )
    assert ok


def test_criterion_06_lie_bracket_reduction(record_property):
    reports = _run_all(SuiteConfig("oracle-lie", dim=m, trials=200, tol=1e-10) for m in (2, 3))
    ok = all(r.passed for r in reports)
    _record(record_property, 6, "degree-0 bracket equals classical Lie bracket, 200 pairs", ok, f"max residual {_worst(reports):.2e} <= 1e-10")
    assert ok


def test_criterion_07_lie_decomposition(record_property):
    reports = _run_all(SuiteConfig("lie-decomposition", dim=m, p=p, q=q, trials=20, tol=1e-9) for m in (2, 3) for p, q in PAIR_GRID)
    floor = max(r.components["floor"] for r in reports)
    ok = all(r.passed for r in reports) and floor <= 1e-9
    _record(
        record_property,
        7,
        "Lie decomposition, flat and curved symmetric connections",
        ok,
        f"alternated {max(r.components['alternated'] for r in reports):.2e}, floor level {floor:.2e} <= 1e-9",
    )
    assert ok


def test_criterion_08_naturality(record_property):
    grid = [SuiteConfig("fn-naturality", dim=2, p=p, q=q, trials=100, tol=1e-8) for p, q in ((0, 0), (0, 1), (1, 1))]
    grid += [SuiteConfig("interior-naturality", dim=2, p=p, q=q, trials=100, tol=1e-8) for p, q in ((1, 1), (1, 2), (2, 1))]
    grid += [SuiteConfig("lie-naturality", dim=2, p=p, q=q, trials=100, tol=1e-8) for p, q in ((0, 0), (0, 1), (1, 1))]
    reports = _run_all(grid)
    ok = all(r.passed for r in reports)
    _record(record_property, 8, "naturality under triangular diffeos of R^2, 100 trials per operator", ok, f"max residual {_worst(reports):.2e} <= 1e-8")
    assert ok


def test_criterion_09_oracle_consistency(record_property):
    reports = _run_all(SuiteConfig("oracle-fn", dim=max(2, p + q), p=p, q=q, trials=100, tol=1e-6) for p, q in PAIR_GRID)
    spread = max(r.components["relative_spread"] for r in reports)
    own = max(r.components[k] for r in reports for k in ("oracle_antisymmetry", "oracle_jacobi"))
    constants = {k: v for r in reports for k, v in r.constants.items()}
    ok = all(r.passed for r in reports) and spread <= 1e-6 and own <= 1e-9
    shown = " ".join(f"{k}={v:.6g}" for k, v in constants.items())
    _record(record_property, 9, "oracle self-consistency and proportionality", ok, f"oracle {own:.2e} <= 1e-9, spread {spread:.2e} <= 1e-6, {shown}")
    assert ok


def _selftest_process():
    return subprocess.Popen(
        [sys.executable, "-m", "fncalc.cli", "selftest", "--seed", "7", "--json"],
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
    )


def test_criterion_10_determinism(record_property):
    first, second = _selftest_process(), _selftest_process()
    out1, err1 = first.communicate()
    out2, err2 = second.communicate()
    ok = out1 == out2 and len(out1) > 0 and first.returncode == 0 and second.returncode == 0
    _record(
        record_property,
        10,
        "two selftest --seed 7 JSON reports are byte-identical",
        ok,
        f"{len(out1)} and {len(out2)} bytes, exit codes {first.returncode} and {second.returncode}",
    )
    assert ok, (err1.decode()[-500:], err2.decode()[-500:])
