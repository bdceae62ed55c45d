"""Seeded random inputs: cubes, kernel forms, triangular diffeomorphisms, connections, sextuples.

Every generator takes either an integer seed or a numpy Generator, so a trial
can derive all its inputs from one stream.
"""

from __future__ import annotations

import itertools
from typing import Dict, Tuple

import numpy as np

from .calculus import Connection
from .forms import FormKernel, KernelTerm, VectorForm
from .microcube import JACOBI_LABELS, Microcube
from .poly import PolyExpr, PolyMap, all_exponents


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def gen_poly(seed, m: int, degree: int = 2, bound: float = 1.0, min_degree: int = 0) -> PolyExpr:
    rng = _rng(seed)
    exps = [e for e in all_exponents(m, degree) if sum(e) >= min_degree]
    return PolyExpr(m, {e: rng.uniform(-bound, bound) for e in exps})


def gen_microcube(seed, n: int, m: int, bound: float = 1.0) -> Microcube:
    return Microcube(_rng(seed).uniform(-bound, bound, size=(1 << n, m)))


def gen_kernel(seed, m: int, p: int, degree: int = 2, bound: float = 1.0) -> FormKernel:
    """A dense kernel: every multi-index and output carries a random polynomial."""
    rng = _rng(seed)
    terms = [
        KernelTerm(cov, j, gen_poly(rng, m, degree, bound))
        for cov in itertools.combinations(range(m), p)
        for j in range(m)
    ]
    return FormKernel(m, p, terms)


def gen_form(seed, m: int, p: int, degree: int = 2, bound: float = 1.0) -> VectorForm:
    return VectorForm(gen_kernel(seed, m, p, degree, bound))


def gen_vector_field(seed, m: int, degree: int = 2, bound: float = 1.0) -> VectorForm:
    return gen_form(seed, m, 0, degree, bound)


def gen_diffeo(seed, m: int, degree: int = 2, bound: float = 1.0) -> Tuple[PolyMap, PolyMap]:
    """Triangular map x_i -> s_i x_i + c_i + g_i(x_1..x_{i-1}) and its polynomial inverse."""
    rng = _rng(seed)
    scales = rng.choice([-1.0, 1.0], size=m) * rng.uniform(0.5, 2.0, size=m)
    shifts = rng.uniform(-bound, bound, size=m)
    comps, lower = [], []
    for i in range(m):
        g = PolyExpr(m)
        if i:
            prefix = [e for e in all_exponents(i, degree) if sum(e) >= 1]
            g = PolyExpr(m, {e + (0,) * (m - i): rng.uniform(-bound, bound) for e in prefix})
        lower.append(g)
        comps.append(PolyExpr.var(m, i) * scales[i] + shifts[i] + g)
    # back-substitution: x_i = (y_i - c_i - g_i(x_1..x_{i-1})) / s_i
    inv = []
    y = [PolyExpr.var(m, i) for i in range(m)]
    for i in range(m):
        prefix = inv + [PolyExpr(m)] * (m - i)
        g = lower[i].compose(prefix) if i else PolyExpr(m)
        inv.append((y[i] - shifts[i] - g) * (1.0 / scales[i]))
    return PolyMap(comps), PolyMap(inv)


def gen_connection(seed, m: int, symmetric: bool = True, degree: int = 1, bound: float = 1.0) -> Connection:
    rng = _rng(seed)
    gamma: Dict[Tuple[int, int, int], PolyExpr] = {}
    for k in range(m):
        for i in range(m):
            for j in range(m):
                if symmetric and j < i:
                    gamma[(k, i, j)] = gamma[(k, j, i)]
                else:
                    gamma[(k, i, j)] = gen_poly(rng, m, degree, bound)
    return Connection(m, gamma, symmetric=symmetric)


def gen_sextuple(seed, m: int, bound: float = 1.0, degenerate: bool | None = None) -> Dict[str, Microcube]:
    """Six degree-3 microcubes satisfying every admissibility constraint of the general Jacobi identity.

    a_0, a_1, a_2, a_3 are shared; a_12 is u on {123,132,312} and v elsewhere,
    a_13 is u' on {123,132,213} and v' elsewhere, a_23 is u'' on
    {123,213,231} and v'' elsewhere; the six a_123 are free.  Degenerate
    samples (all six cubes equal) and generic ones are drawn with equal odds
    unless `degenerate` is given.
    """
    rng = _rng(seed)
    if degenerate is None:
        degenerate = bool(rng.integers(2))

    def draw():
        return rng.uniform(-bound, bound, size=m)

    shared = {mask: draw() for mask in (0, 1, 2, 4)}
    pattern = {3: {"123", "132", "312"}, 5: {"123", "132", "213"}, 6: {"123", "213", "231"}}
    pair_values = {}
    for mask in pattern:
        u = draw()
        pair_values[mask] = (u, u.copy() if degenerate else draw())
    top = draw()
    out = {}
    for label in JACOBI_LABELS:
        coeffs = np.zeros((8, m))
        for mask, v in shared.items():
            coeffs[mask] = v
        for mask, members in pattern.items():
            u, v = pair_values[mask]
            coeffs[mask] = u if label in members else v
        coeffs[7] = top if degenerate else draw()
        out[label] = Microcube(coeffs)
    return out
