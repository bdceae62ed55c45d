"""Classical coordinate formulas for Lie and Froelicher-Nijenhuis brackets.

Kept independent of the Weil engine: everything here is formal polynomial
differentiation and real evaluation.  Scalar forms use the determinant
convention, (dx^1 ^ dx^2)(e_1, e_2) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import ArityError
from .forms import FormKernel, KernelTerm
from .poly import PolyExpr

Index = Tuple[int, ...]
VectorField = List[PolyExpr]


def _sort_sign(idx: Sequence[int]) -> Tuple[int, Index]:
    """(sign of the sorting permutation, sorted index), sign 0 on a repeat."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    s = 1
    for i in range(len(idx)):
        for j in range(i + 1, len(idx)):
            if idx[i] > idx[j]:
                s = -s
    return s, tuple(sorted(idx))


class ScalarForm:
    """sum_I c_I(x) dx^I with strictly increasing 0-based multi-indices I."""

    def __init__(self, dim: int, degree: int, terms: Dict[Index, PolyExpr] | None = None):
        self.dim, self.degree = dim, degree
        clean: Dict[Index, PolyExpr] = {}
        for I, c in (terms or {}).items():
            I = tuple(I)
            if len(I) != degree:
                raise ArityError(f"multi-index {I} in a degree-{degree} form")
            if c.nvars != dim:
                raise ArityError("coefficient in the wrong number of variables")
            if any(b <= a for a, b in zip(I, I[1:])):
                raise ValueError(f"multi-index {I} not strictly increasing")
            if not c.is_zero():
                clean[I] = clean[I] + c if I in clean else c
        self.terms = {I: c for I, c in clean.items() if not c.is_zero()}

    @classmethod
    def function(cls, f: PolyExpr) -> "ScalarForm":
        return cls(f.nvars, 0, {(): f})

    @classmethod
    def zero(cls, dim: int, degree: int) -> "ScalarForm":
        return cls(dim, degree, {})

    def is_zero(self, tol: float = 1e-12) -> bool:
        return all(all(abs(v) <= tol for v in c.terms.values()) for c in self.terms.values())

    def __add__(self, other: "ScalarForm") -> "ScalarForm":
        if other.degree != self.degree:
            raise ArityError("adding forms of different degrees")
        out = dict(self.terms)
        for I, c in other.terms.items():
            out[I] = out[I] + c if I in out else c
        return ScalarForm(self.dim, self.degree, out)

    def __neg__(self) -> "ScalarForm":
        return ScalarForm(self.dim, self.degree, {I: -c for I, c in self.terms.items()})

    def __sub__(self, other: "ScalarForm") -> "ScalarForm":
        return self + (-other)

    def scale(self, s) -> "ScalarForm":
        """Multiply by a real number or a polynomial function."""
        return ScalarForm(self.dim, self.degree, {I: c * s for I, c in self.terms.items()})

    def wedge(self, other: "ScalarForm") -> "ScalarForm":
        degree = self.degree + other.degree
        out: Dict[Index, PolyExpr] = {}
        if degree > self.dim:
            return ScalarForm.zero(self.dim, degree)
        for I, a in self.terms.items():
            for J, b in other.terms.items():
                s, K = _sort_sign(I + J)
                if s:
                    term = a * b * s
                    out[K] = out[K] + term if K in out else term
        return ScalarForm(self.dim, degree, out)

    def d(self) -> "ScalarForm":
        degree = self.degree + 1
        out: Dict[Index, PolyExpr] = {}
        if degree > self.dim:
            return ScalarForm.zero(self.dim, degree)
        for I, c in self.terms.items():
            for i in range(self.dim):
                s, K = _sort_sign((i,) + I)
                if s:
                    term = c.derivative(i) * s
                    out[K] = out[K] + term if K in out else term
        return ScalarForm(self.dim, degree, out)

    def interior(self, X: VectorField) -> "ScalarForm":
        """i_X: insert X into the first slot; zero on functions."""
        if self.degree == 0:
            return ScalarForm.zero(self.dim, 0)
        out: Dict[Index, PolyExpr] = {}
        for I, c in self.terms.items():
            for s, i in enumerate(I):
                K = I[:s] + I[s + 1 :]
                term = c * X[i] * (-1) ** s
                out[K] = out[K] + term if K in out else term
        return ScalarForm(self.dim, self.degree - 1, out)

    def lie(self, X: VectorField) -> "ScalarForm":
        """Cartan's formula d i_X + i_X d."""
        inner = self.interior(X).d() if self.degree > 0 else ScalarForm.zero(self.dim, self.degree)
        return inner + self.d().interior(X)

    def __call__(self, x, vectors: Sequence[Sequence[float]]) -> float:
        """Evaluate at point x on the given tangent vectors."""
        if len(vectors) != self.degree:
            raise ArityError(f"degree-{self.degree} form needs {self.degree} vectors")
        V = np.asarray(vectors, dtype=float).reshape(self.degree, self.dim)
        total = 0.0
        for I, c in self.terms.items():
            minor = np.linalg.det(V[:, list(I)]) if I else 1.0
            total += c(x) * minor
        return total


def lie_bracket_classical(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y]^j = sum_i X^i d_i Y^j - Y^i d_i X^j."""
    if len(X) != len(Y):
        raise ArityError("vector fields of different dimensions")
    m = len(X)
    out = []
    for j in range(m):
        acc = PolyExpr(X[j].nvars)
        for i in range(m):
            acc = acc + X[i] * Y[j].derivative(i) - Y[i] * X[j].derivative(i)
        out.append(acc)
    return out


@dataclass
class DecomposableVF:
    """phi (x) X."""

    form: ScalarForm
    field: VectorField

    @property
    def degree(self) -> int:
        return self.form.degree


VVForm = List[DecomposableVF]


def from_kernel(kernel: FormKernel) -> VVForm:
    """Split a kernel into decomposables c dx^I (x) d/dx^j."""
    m = kernel.dim
    out = []
    for t in kernel.terms:
        e = [PolyExpr.const(m, 1.0 if i == t.output else 0.0) for i in range(m)]
        out.append(DecomposableVF(ScalarForm(m, kernel.degree, {t.covariant: t.coeff}), e))
    return out


def to_kernel(forms: VVForm, dim: int, degree: int) -> FormKernel:
    """Canonical kernel of a sum of decomposables (expands phi (x) X componentwise)."""
    terms = []
    for dv in forms:
        if dv.degree != degree:
            raise ArityError("mixed degrees in a vector-valued form")
        for I, c in dv.form.terms.items():
            for j, Xj in enumerate(dv.field):
                prod = c * Xj
                if not prod.is_zero():
                    terms.append(KernelTerm(I, j, prod))
    return FormKernel(dim, degree, terms)


def _decomposable_bracket(a: DecomposableVF, b: DecomposableVF, flip: bool) -> VVForm:
    phi, X, psi, Y = a.form, a.field, b.form, b.field
    k = phi.degree
    sk = (-1) ** k * (-1 if flip else 1)
    out = [
        DecomposableVF(phi.wedge(psi), lie_bracket_classical(X, Y)),
        DecomposableVF(phi.wedge(psi.lie(X)), Y),
        DecomposableVF(-phi.lie(Y).wedge(psi), X),
    ]
    if psi.degree > 0:
        out.append(DecomposableVF(phi.d().wedge(psi.interior(X)).scale(sk), Y))
    if phi.degree > 0:
        out.append(DecomposableVF(phi.interior(Y).wedge(psi.d()).scale(sk), X))
    return out


def fn_bracket_classical(A: VVForm, B: VVForm, flip: bool = False) -> VVForm:
    """Bilinear extension of the decomposable FN formula.

    `flip` negates the (-1)^k terms; it is a planted bug for the self-test.
    """
    out: VVForm = []
    for a in A:
        for b in B:
            out.extend(_decomposable_bracket(a, b, flip))
    return out


def kernel_bracket(K: FormKernel, L: FormKernel, flip: bool = False) -> FormKernel:
    """Classical FN bracket of two kernels, returned in canonical kernel form."""
    return to_kernel(fn_bracket_classical(from_kernel(K), from_kernel(L), flip), K.dim, K.degree + L.degree)


def evaluate(forms: VVForm, x, vectors: Sequence[Sequence[float]]) -> np.ndarray:
    """Value of a sum of decomposables at x on the given vectors."""
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.size)
    for dv in forms:
        s = dv.form(x, vectors)
        if s:
            total += s * np.array([c(x) for c in dv.field])
    return total


def evaluate_kernel(kernel: FormKernel, x, vectors: Sequence[Sequence[float]]) -> np.ndarray:
    return evaluate(from_kernel(kernel), x, vectors)


def kernel_gap(K: FormKernel, L: FormKernel) -> float:
    """Largest coefficient of K - L in canonical form."""
    if K.dim != L.dim or K.degree != L.degree:
        raise ArityError("comparing kernels of different shapes")
    diff: Dict[Tuple[Index, int], PolyExpr] = {}
    for t in K.terms:
        diff[(t.covariant, t.output)] = t.coeff
    for t in L.terms:
        key = (t.covariant, t.output)
        diff[key] = diff[key] - t.coeff if key in diff else -t.coeff
    return max((abs(v) for c in diff.values() for v in c.terms.values()), default=0.0)


def scale_kernel(K: FormKernel, s: float) -> FormKernel:
    return FormKernel(K.dim, K.degree, [KernelTerm(t.covariant, t.output, t.coeff * s) for t in K.terms])


def add_kernels(*Ks: FormKernel) -> FormKernel:
    return FormKernel(Ks[0].dim, Ks[0].degree, [t for K in Ks for t in K.terms])
