"""Tangent-vector-valued forms and semiforms on R^m.

Every form or semiform is an evaluator E with a degree n: given a fresh tag d
and a degree-n cube gamma (possibly with Weil-valued coefficients), E(d, gamma)
is the point E_d(gamma) = o_n(gamma) + d * dir(gamma).  Because the result is
computed in the Weil algebra, d is a genuine nilpotent parameter, and nested
operators simply feed one evaluator's output into another as cube data.

Forms given by polynomial kernels use the determinant convention: the kernel
term c(x) dx^I (x) d/dx^j evaluates on gamma to c(x) det[a_(r)^(I_s)] e_j, where
a_(r) is the coefficient of slot r alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import ArityError, DegreeError, TagCollisionError
from .microcube import Microcube, Permutation, TangentVector, WeilCube, random_microcube
from .poly import PolyExpr, PolyMap, PowerCache, eval_poly
from .weil import WeilElement, WeilVector, fresh_tags, tag_bit


@dataclass(frozen=True)
class KernelTerm:
    covariant: Tuple[int, ...]  # 0-based, strictly increasing
    output: int  # 0-based
    coeff: PolyExpr


class FormKernel:
    """Polynomial vector-valued p-form: sum of c(x) dx^I (x) d/dx^j."""

    def __init__(self, dim: int, degree: int, terms: Iterable[KernelTerm]):
        self.dim = dim
        self.degree = degree
        merged: Dict[Tuple[Tuple[int, ...], int], PolyExpr] = {}
        for t in terms:
            cov = tuple(t.covariant)
            if len(cov) != degree:
                raise DegreeError(f"multi-index {cov} in a degree-{degree} kernel")
            if any(b <= a for a, b in zip(cov, cov[1:])):
                raise ValueError(f"covariant multi-index {[i + 1 for i in cov]} is not strictly increasing")
            if any(not 0 <= i < dim for i in cov) or not 0 <= t.output < dim:
                raise ArityError(f"index out of range in dimension {dim}")
            if t.coeff.nvars != dim:
                raise ArityError(f"coefficient in {t.coeff.nvars} variables on R^{dim}")
            key = (cov, t.output)
            merged[key] = merged[key] + t.coeff if key in merged else t.coeff
        self.terms = tuple(
            KernelTerm(cov, out, c) for (cov, out), c in sorted(merged.items(), key=lambda kv: kv[0]) if not c.is_zero()
        )

    @classmethod
    def vector_field(cls, components: Sequence[PolyExpr]) -> "FormKernel":
        m = len(components)
        return cls(m, 0, [KernelTerm((), j, c) for j, c in enumerate(components)])

    @classmethod
    def identity(cls, m: int) -> "FormKernel":
        """The identity 1-form: v -> v."""
        return cls(m, 1, [KernelTerm((i,), i, PolyExpr.const(m, 1.0)) for i in range(m)])

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "degree": self.degree,
            "terms": [
                {"covariant": [i + 1 for i in t.covariant], "output": t.output + 1, "coeff": t.coeff.to_json()}
                for t in self.terms
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FormKernel":
        dim, degree = int(obj["dim"]), int(obj["degree"])
        terms = []
        for t in obj["terms"]:
            cov = [int(i) for i in t["covariant"]]
            if any(b <= a for a, b in zip(cov, cov[1:])):
                raise ValueError(f"covariant list {cov} is not strictly increasing")
            terms.append(KernelTerm(tuple(i - 1 for i in cov), int(t["output"]) - 1, PolyExpr.from_json(t["coeff"], dim)))
        return cls(dim, degree, terms)


class SemiForm:
    """Base class for evaluators of degree `degree` on R^`dim`."""

    degree: int
    dim: int

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        raise NotImplementedError

    def _check(self, d: int, cube: WeilCube) -> None:
        if cube.degree != self.degree:
            raise DegreeError(f"degree-{self.degree} evaluator applied to a degree-{cube.degree} cube")
        if cube.dim != self.dim:
            raise ArityError(f"evaluator on R^{self.dim} applied to a cube in R^{cube.dim}")
        if cube.used_tags & tag_bit(d):
            raise TagCollisionError(f"tag {d} already occurs in the cube")

    def direction(self, d: int, cube: WeilCube) -> WeilVector:
        return self(d, cube).cofactor(tag_bit(d))

    def tangent(self, gamma: Microcube) -> TangentVector:
        """Evaluate on a real cube: base and direction of E(gamma)."""
        cube = gamma.to_weil()
        d = fresh_tags(1, cube.used_tags)[0]
        base, direction = self(d, cube).split(d)
        return TangentVector(base.to_real(), direction.to_real())


class VectorForm(SemiForm):
    """A form given by a polynomial kernel."""

    def __init__(self, kernel: FormKernel):
        self.kernel = kernel
        self.degree = kernel.degree
        self.dim = kernel.dim
        groups: Dict[Tuple[int, ...], List[Tuple[int, PolyExpr]]] = {}
        for t in kernel.terms:
            groups.setdefault(t.covariant, []).append((t.output, t.coeff))
        self._groups = groups

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        x = cube.base()
        edges = [cube.edge(r) for r in range(self.degree)]
        cache = PowerCache(x.comps)
        out = [WeilElement() for _ in range(self.dim)]
        for cov, entries in self._groups.items():
            minor = _det([[edges[r].comps[i] for i in cov] for r in range(self.degree)])
            if not minor.terms:
                continue
            for j, c in entries:
                out[j] = out[j] + eval_poly(c, x.comps, cache) * minor
        return x + WeilVector(out).times_tag(d)


def _det(rows: List[List[WeilElement]]) -> WeilElement:
    n = len(rows)
    if n == 0:
        return WeilElement.const(1.0)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = WeilElement()
    for col in range(n):
        if not rows[0][col].terms:
            continue
        minor = [row[:col] + row[col + 1 :] for row in rows[1:]]
        term = rows[0][col] * _det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


def apply_form(K: SemiForm, d: int, cube: WeilCube) -> WeilVector:
    return K(d, cube)


class Permuted(SemiForm):
    """E^sigma: gamma -> E(gamma^sigma)."""

    def __init__(self, E: SemiForm, sigma: Permutation):
        if sigma.n != E.degree:
            raise DegreeError(f"permutation of {sigma.n} on a degree-{E.degree} evaluator")
        self.E, self.sigma = E, sigma
        self.degree, self.dim = E.degree, E.dim

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        return self.E(d, cube.permute(self.sigma))


class Combination(SemiForm):
    """Tangent-space linear combination sum c_i E_i at the shared base point."""

    def __init__(self, parts: Sequence[Tuple[float, SemiForm]]):
        parts = list(parts)
        if not parts:
            raise ArityError("empty combination")
        self.degree, self.dim = parts[0][1].degree, parts[0][1].dim
        if any(E.degree != self.degree or E.dim != self.dim for _, E in parts):
            raise DegreeError("combined evaluators differ in degree or dimension")
        self.parts = parts

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        total = WeilVector.zeros(self.dim)
        for c, E in self.parts:
            total = total + E.direction(d, cube) * c
        return cube.base() + total.times_tag(d)


def alternation_weight(blocks: Sequence[int] | None) -> float:
    if blocks is None:
        return 1.0
    return 1.0 / math.prod(math.factorial(b) for b in blocks)


class Alternation(SemiForm):
    """weight * sum_sigma sign(sigma) E(gamma^sigma), summed at the base point.

    `blocks` = (p, q) or (p, q, r) selects the weight 1/(p! q! (r!)); None
    means weight 1 (the bare operator A).
    """

    def __init__(self, E: SemiForm, blocks: Sequence[int] | None = None, signed: bool = True):
        if blocks is not None and sum(blocks) != E.degree:
            raise DegreeError(f"blocks {tuple(blocks)} do not add up to degree {E.degree}")
        self.E = E
        self.blocks = None if blocks is None else tuple(blocks)
        self.weight = alternation_weight(blocks)
        self.degree, self.dim = E.degree, E.dim
        self._perms = [(s.sign if signed else 1, s) for s in Permutation.all(E.degree)]

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        bit = tag_bit(d)
        acc: List[Dict[int, float]] = [{} for _ in range(self.dim)]
        for sgn, sigma in self._perms:
            w = sgn * self.weight
            value = self.E(d, cube.permute(sigma))
            for j, comp in enumerate(value.comps):
                a = acc[j]
                for k, c in comp.terms.items():
                    if k & bit:
                        a[k] = a.get(k, 0.0) + w * c
        return cube.base() + WeilVector([WeilElement(a) for a in acc])


def alternate(E: SemiForm, blocks: Sequence[int] | None = None) -> Alternation:
    return Alternation(E, blocks)


class PulledBack(SemiForm):
    """K_d(gamma) = f^{-1}(K'_d(f o gamma)); K' is f-related to it by construction."""

    def __init__(self, f: PolyMap, f_inv: PolyMap, target: SemiForm):
        if f.source_dim != f.target_dim or f.target_dim != target.dim:
            raise ArityError("pull-back needs a self-map of the form's space")
        self.f, self.f_inv, self.target = f, f_inv, target
        self.degree, self.dim = target.degree, f.source_dim

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        return self.f_inv(self.target(d, cube.push(self.f)))


def pullback_related(
    f: PolyMap, f_inv: PolyMap, target: SemiForm, points: Iterable | None = None, tol: float = 1e-9, seed: int = 0
) -> PulledBack:
    """The form on the source to which `target` is f-related; validates f_inv first."""
    if points is None:
        rng = np.random.default_rng(seed)
        points = rng.uniform(-1.0, 1.0, size=(16, f.source_dim))
    f.validate_inverse(f_inv, points, tol)
    return PulledBack(f, f_inv, target)


def _cubes(E: SemiForm, trials: int, seed: int, bound: float, cubes: Iterable[Microcube] | None):
    if cubes is not None:
        return list(cubes)
    rng = np.random.default_rng(seed)
    return [random_microcube(rng, E.degree, E.dim, bound) for _ in range(trials)]


def _gap(t1: TangentVector, base, direction) -> float:
    return float(max(np.max(np.abs(t1.base - base), initial=0.0), np.max(np.abs(t1.direction - direction), initial=0.0)))


def check_base(E: SemiForm, trials: int = 20, seed: int = 0, bound: float = 1.0, cubes=None) -> float:
    """max |E_0(gamma) - o_n(gamma)|."""
    worst = 0.0
    for gamma in _cubes(E, trials, seed, bound, cubes):
        worst = max(worst, float(np.max(np.abs(E.tangent(gamma).base - gamma.base))))
    return worst


def check_homogeneity(
    E: SemiForm,
    trials: int = 20,
    alphas: Sequence[float] = (2.0, -0.5, 3.0),
    seed: int = 0,
    bound: float = 1.0,
    cubes=None,
) -> float:
    """max gap between E(alpha ._i gamma) and the tangent with alpha-scaled direction."""
    worst = 0.0
    for gamma in _cubes(E, trials, seed, bound, cubes):
        ref = E.tangent(gamma)
        for i in range(1, E.degree + 1):
            for alpha in alphas:
                got = E.tangent(gamma.scale_i(alpha, i))
                worst = max(worst, _gap(got, gamma.base, alpha * ref.direction))
    return worst


def check_alternating(
    E: SemiForm,
    trials: int = 20,
    seed: int = 0,
    bound: float = 1.0,
    cubes=None,
    permute: bool = True,
) -> float:
    """max gap between E(gamma^sigma) and sign(sigma) E(gamma) over all sigma.

    `permute=False` skips the permutation of the argument; it exists only as a
    planted bug for the harness self-test.
    """
    worst = 0.0
    perms = list(Permutation.all(E.degree))
    for gamma in _cubes(E, trials, seed, bound, cubes):
        ref = E.tangent(gamma)
        for sigma in perms:
            got = E.tangent(gamma.permute(sigma) if permute else gamma)
            worst = max(worst, _gap(got, gamma.base, sigma.sign * ref.direction))
    return worst


def tangent_value(E: SemiForm, base, directions: Sequence[Sequence[float]]) -> TangentVector:
    """Evaluate on the cube with the given base and axis directions, higher coefficients zero."""
    base = np.asarray(base, dtype=float)
    n = len(directions)
    coeffs = np.zeros((1 << n, base.size))
    coeffs[0] = base
    for r, v in enumerate(directions):
        coeffs[1 << r] = v
    return E.tangent(Microcube(coeffs))

