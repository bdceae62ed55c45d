"""Multivariate real polynomials and polynomial maps R^m -> R^m'.

All smooth data in the engine (form coefficients, Christoffel symbols,
diffeomorphisms) is polynomial, so formal differentiation and composition
here are exact.
"""

from __future__ import annotations

from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import ArityError, InverseError
from .weil import WeilElement, WeilVector

Exponents = Tuple[int, ...]


class PolyExpr:
    """Polynomial in `nvars` variables, stored as {exponent vector: coefficient}."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Dict[Exponents, float] | None = None):
        self.nvars = nvars
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ArityError(f"exponent vector {exps} has length != {nvars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if c:
                clean[exps] = clean.get(exps, 0.0) + float(c)
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def const(cls, nvars: int, c: float) -> "PolyExpr":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "PolyExpr":
        exps = [0] * nvars
        exps[i] = 1
        return cls(nvars, {tuple(exps): 1.0})

    @classmethod
    def from_terms(cls, nvars: int, terms: Iterable[Tuple[Sequence[int], float]]) -> "PolyExpr":
        out: Dict[Exponents, float] = {}
        for exps, c in terms:
            exps = tuple(exps)
            out[exps] = out.get(exps, 0.0) + c
        return cls(nvars, out)

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "PolyExpr") -> None:
        if other.nvars != self.nvars:
            raise ArityError(f"polynomials in {self.nvars} and {other.nvars} variables")

    def __add__(self, other):
        if not isinstance(other, PolyExpr):
            other = PolyExpr.const(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return PolyExpr(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "PolyExpr":
        return PolyExpr(self.nvars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolyExpr):
            return PolyExpr(self.nvars, {k: c * other for k, c in self.terms.items()})
        self._check(other)
        out: Dict[Exponents, float] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = tuple(a + b for a, b in zip(ka, kb))
                out[k] = out.get(k, 0.0) + ca * cb
        return PolyExpr(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "PolyExpr":
        out = PolyExpr.const(self.nvars, 1.0)
        for _ in range(n):
            out = out * self
        return out

    def derivative(self, i: int) -> "PolyExpr":
        out = {}
        for exps, c in self.terms.items():
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                out[tuple(e)] = c * exps[i]
        return PolyExpr(self.nvars, out)

    def compose(self, inner: Sequence["PolyExpr"]) -> "PolyExpr":
        """Substitute polynomials for the variables: p(q_1, ..., q_n)."""
        if len(inner) != self.nvars:
            raise ArityError(f"compose needs {self.nvars} polynomials, got {len(inner)}")
        n = inner[0].nvars if inner else 0
        powers: Dict[Tuple[int, int], PolyExpr] = {}

        def power(i, e):
            if (i, e) not in powers:
                powers[(i, e)] = inner[i] ** e
            return powers[(i, e)]

        out = PolyExpr(n)
        for exps, c in self.terms.items():
            term = PolyExpr.const(n, c)
            for i, e in enumerate(exps):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def __call__(self, x: Sequence[float]) -> float:
        """Evaluate at a real point."""
        if len(x) != self.nvars:
            raise ArityError(f"expected {self.nvars} arguments, got {len(x)}")
        total = 0.0
        for exps, c in self.terms.items():
            v = c
            for xi, e in zip(x, exps):
                if e:
                    v *= xi**e
            total += v
        return total

    def isclose(self, other: "PolyExpr", tol: float = 1e-12) -> bool:
        self._check(other)
        return all(abs(c) <= tol for c in (self - other).terms.values())

    def to_json(self) -> dict:
        return {
            "terms": [
                {"exponents": list(e), "coefficient": c} for e, c in sorted(self.terms.items())
            ]
        }

    @classmethod
    def from_json(cls, obj: dict, nvars: int) -> "PolyExpr":
        seen = set()
        terms = []
        for t in obj["terms"]:
            exps = tuple(t["exponents"])
            if exps in seen:
                raise ValueError(f"duplicate exponent vector {list(exps)}")
            seen.add(exps)
            terms.append((exps, float(t["coefficient"])))
        return cls.from_terms(nvars, terms)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in sorted(self.terms.items()):
            mono = "*".join(f"x{i + 1}^{e}" if e > 1 else f"x{i + 1}" for i, e in enumerate(exps) if e)
            parts.append(f"{c:g}" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)


class PowerCache:
    """Memoized monomials of fixed Weil-valued arguments.

    Several polynomials evaluated at the same point (all coefficients of one
    kernel) share their monomials through one cache.
    """

    def __init__(self, args: Sequence[WeilElement]):
        self.args = list(args)
        self._powers: Dict[Tuple[int, int], WeilElement] = {}
        self._monomials: Dict[Exponents, WeilElement] = {}

    def power(self, i: int, e: int) -> WeilElement:
        key = (i, e)
        got = self._powers.get(key)
        if got is None:
            got = self.args[i] if e == 1 else self.power(i, e - 1) * self.args[i]
            self._powers[key] = got
        return got

    def monomial(self, exps: Exponents) -> WeilElement | None:
        """x^exps, or None for the constant monomial."""
        got = self._monomials.get(exps)
        if got is None and any(exps):
            for i, e in enumerate(exps):
                if e:
                    p = self.power(i, e)
                    got = p if got is None else got * p
            self._monomials[exps] = got
        return got


def eval_poly(p: PolyExpr, args: Sequence, cache: PowerCache | None = None) -> WeilElement:
    """Evaluate p at Weil-valued arguments."""
    if len(args) != p.nvars:
        raise ArityError(f"expected {p.nvars} arguments, got {len(args)}")
    if cache is None:
        cache = PowerCache([a if isinstance(a, WeilElement) else WeilElement.const(a) for a in args])
    out: Dict[int, float] = {}
    for exps, c in p.terms.items():
        mono = cache.monomial(exps)
        if mono is None:
            out[0] = out.get(0, 0.0) + c
            continue
        for k, v in mono.terms.items():
            out[k] = out.get(k, 0.0) + c * v
    return WeilElement(out)


class PolyMap:
    """Polynomial map f: R^m -> R^m', one PolyExpr per target coordinate."""

    def __init__(self, components: Sequence[PolyExpr]):
        self.components = list(components)
        if not self.components:
            raise ArityError("a polynomial map needs at least one component")
        self.source_dim = self.components[0].nvars
        if any(c.nvars != self.source_dim for c in self.components):
            raise ArityError("components disagree on the number of variables")

    @property
    def target_dim(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, m: int) -> "PolyMap":
        return cls([PolyExpr.var(m, i) for i in range(m)])

    def __call__(self, x):
        """Apply to a real point (array) or a WeilVector."""
        if isinstance(x, WeilVector):
            if x.dim != self.source_dim:
                raise ArityError(f"map expects dim {self.source_dim}, got {x.dim}")
            cache = PowerCache(x.comps)
            return WeilVector([eval_poly(c, x.comps, cache) for c in self.components])
        x = np.asarray(x, dtype=float)
        return np.array([c(x) for c in self.components])

    def compose(self, inner: "PolyMap") -> "PolyMap":
        """self o inner."""
        return PolyMap([c.compose(inner.components) for c in self.components])

    def jacobian(self) -> List[List[PolyExpr]]:
        """J[k][i] = d f_k / d x_i."""
        return [[c.derivative(i) for i in range(self.source_dim)] for c in self.components]

    def hessian(self) -> List[List[List[PolyExpr]]]:
        """H[k][i][j] = d^2 f_k / d x_i d x_j."""
        return [
            [[c.derivative(i).derivative(j) for j in range(self.source_dim)] for i in range(self.source_dim)]
            for c in self.components
        ]

    def validate_inverse(self, inverse: "PolyMap", points: Iterable, tol: float = 1e-9) -> float:
        """Max |inverse(f(x)) - x| over the points; raises InverseError above tol."""
        gap = 0.0
        for x in points:
            x = np.asarray(x, dtype=float)
            gap = max(gap, float(np.max(np.abs(inverse(self(x)) - x))))
        if gap > tol:
            raise InverseError(f"supplied inverse misses by {gap:.3g}")
        return gap

    def to_json(self) -> dict:
        return {"dim": self.source_dim, "components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, obj: dict) -> "PolyMap":
        return cls([PolyExpr.from_json(c, obj["dim"]) for c in obj["components"]])


def all_exponents(nvars: int, max_degree: int) -> List[Exponents]:
    """Every exponent vector of total degree <= max_degree, in a fixed order."""
    return [e for e in product(range(max_degree + 1), repeat=nvars) if sum(e) <= max_degree]
