"""Microcubes on R^m in Kock-Lawvere normal form.

A microcube of degree n is the map (d_1, ..., d_n) -> sum_S a_S prod_{i in S} d_i
with one vector a_S in R^m per subset S of {1..n}.  `Microcube` stores the
2^n vectors as a real array indexed by bitmask (bit i-1 <-> slot i).
`WeilCube` is the same object with Weil-valued coefficients, stored as the
generic value gamma(t_1, ..., t_n) at formal slot tags; this is what form
evaluators consume.

Permutation convention: gamma^sigma has coefficient table
a'_S = a_{sigma(S)}, so slot j of gamma^sigma is slot sigma(j) of gamma, and
(gamma^sigma)^tau = gamma^(sigma tau) with (sigma tau)(i) = sigma(tau(i)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

import numpy as np

from .errors import AgreementError, ArityError, ContaminationError, DegreeError
from .poly import PolyMap
from .weil import WeilElement, WeilVector, tag_bit, tagset

DEFAULT_TOL = 1e-9


class Permutation:
    """A permutation of {0..n-1}, sigma(i) = images[i]."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"{images} is not a permutation of 0..{len(images) - 1}")
        self.images = images

    @classmethod
    def from_arrangement(cls, arrangement: Sequence[int]) -> "Permutation":
        """From the 1-based image list (sigma(1), ..., sigma(n))."""
        return cls([a - 1 for a in arrangement])

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def all(cls, n: int) -> Iterator["Permutation"]:
        for images in itertools.permutations(range(n)):
            yield cls(images)

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def sign(self) -> int:
        inversions = sum(
            1 for i in range(self.n) for j in range(i + 1, self.n) if self.images[i] > self.images[j]
        )
        return -1 if inversions % 2 else 1

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.n != self.n:
            raise ArityError("permutations of different sizes")
        return Permutation([self.images[other.images[i]] for i in range(self.n)])

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, s in enumerate(self.images):
            inv[s] = i
        return Permutation(inv)

    def map_mask(self, mask: int) -> int:
        """sigma(S) for a subset S given as a bitmask."""
        out = 0
        for i, s in enumerate(self.images):
            if mask >> i & 1:
                out |= 1 << s
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Permutation({[i + 1 for i in self.images]})"


def sign(sigma: Permutation) -> int:
    return sigma.sign


def block_permutation(sizes: Sequence[int], order: Sequence[int]) -> Permutation:
    """Rearrange consecutive slot blocks so that block order[0] comes first, etc.

    With sizes (p, q) and order (1, 0) this is the swap taking the q-block in
    front of the p-block; its sign is (-1)^(pq).
    """
    starts = [sum(sizes[:b]) for b in range(len(sizes))]
    images = []
    for b in order:
        images.extend(range(starts[b], starts[b] + sizes[b]))
    return Permutation(images)


def _subset_mask(subset: Iterable[int]) -> int:
    mask = 0
    for i in subset:
        mask |= 1 << (i - 1)
    return mask


class Microcube:
    """gamma in (R^m)^(D^n) as a (2^n, m) coefficient table."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = np.array(coeffs, dtype=float)
        if coeffs.ndim != 2:
            raise ArityError("coefficient table must be 2-dimensional (2^n, m)")
        size = coeffs.shape[0]
        if size < 1 or size & (size - 1):
            raise ArityError(f"table has {size} rows, not a power of two")
        self.coeffs = coeffs

    @classmethod
    def from_subsets(cls, n: int, m: int, table: Mapping[Tuple[int, ...], Sequence[float]]) -> "Microcube":
        """Build from {1-based subset: vector}; absent subsets are zero."""
        coeffs = np.zeros((1 << n, m))
        for subset, vec in table.items():
            coeffs[_subset_mask(subset)] = vec
        return cls(coeffs)

    @classmethod
    def point(cls, x) -> "Microcube":
        return cls(np.asarray(x, dtype=float).reshape(1, -1))

    @property
    def n(self) -> int:
        return self.coeffs.shape[0].bit_length() - 1

    @property
    def m(self) -> int:
        return self.coeffs.shape[1]

    @property
    def base(self) -> np.ndarray:
        """o_n(gamma) = gamma(0, ..., 0)."""
        return self.coeffs[0].copy()

    def coeff(self, subset: Iterable[int]) -> np.ndarray:
        return self.coeffs[_subset_mask(subset)].copy()

    def eval(self, args: Sequence) -> WeilVector:
        if len(args) != self.n:
            raise ArityError(f"degree-{self.n} cube evaluated at {len(args)} arguments")
        args = [a if isinstance(a, WeilElement) else WeilElement.const(a) for a in args]
        prods = [WeilElement.const(1.0)]
        for mask in range(1, 1 << self.n):
            low = (mask & -mask).bit_length() - 1
            prods.append(prods[mask ^ (1 << low)] * args[low])
        comps = []
        for j in range(self.m):
            acc: Dict[int, float] = {}
            for mask, prod in enumerate(prods):
                a = self.coeffs[mask, j]
                if a == 0.0:
                    continue
                for k, c in prod.terms.items():
                    acc[k] = acc.get(k, 0.0) + a * c
            comps.append(WeilElement(acc))
        return WeilVector(comps)

    @classmethod
    def extract(cls, v: WeilVector, tags: Sequence[int]) -> "Microcube":
        """Read a_S off the monomials of v in the given cube tags."""
        bits = [tag_bit(t) for t in tags]
        allowed = tagset(tags)
        n = len(tags)
        coeffs = np.zeros((1 << n, v.dim))
        for j, comp in enumerate(v.comps):
            for k, c in comp.terms.items():
                if k & ~allowed:
                    if c == 0.0:
                        continue
                    raise ContaminationError(
                        f"component {j} carries foreign tags (monomial mask {k:#x}) outside cube tags {list(tags)}"
                    )
                idx = 0
                for i, b in enumerate(bits):
                    if k & b:
                        idx |= 1 << i
                coeffs[idx, j] += c
        return cls(coeffs)

    def permute(self, sigma: Permutation) -> "Microcube":
        """gamma^sigma: new a_S = old a_{sigma(S)}."""
        if sigma.n != self.n:
            raise ArityError(f"permutation of {sigma.n} acting on a degree-{self.n} cube")
        idx = [sigma.map_mask(mask) for mask in range(1 << self.n)]
        return Microcube(self.coeffs[idx])

    def scale_i(self, alpha: float, i: int) -> "Microcube":
        """alpha ._i gamma: multiply a_S by alpha whenever i in S (1-based i)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"slot {i} outside 1..{self.n}")
        out = self.coeffs.copy()
        bit = 1 << (i - 1)
        for mask in range(1 << self.n):
            if mask & bit:
                out[mask] *= alpha
        return Microcube(out)

    def to_weil(self, tags: Sequence[int] | None = None) -> "WeilCube":
        if tags is None:
            tags = range(self.n)
        tags = tuple(tags)
        return WeilCube(self.eval([WeilElement.tag(t) for t in tags]), tags)

    def allclose(self, other: "Microcube", tol: float = DEFAULT_TOL) -> bool:
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.max(np.abs(self.coeffs - other.coeffs), initial=0.0) <= tol
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Microcube) and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Microcube(n={self.n}, m={self.m}, coeffs={self.coeffs.tolist()})"


@dataclass(frozen=True)
class TangentVector:
    """t(d) = base + d * direction."""

    base: np.ndarray
    direction: np.ndarray

    def as_microcube(self) -> Microcube:
        return Microcube(np.vstack([self.base, self.direction]))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.base, self.direction + other.direction)


class WeilCube:
    """A microcube with Weil-valued coefficients: point = gamma(slots...).

    Every tag of `point` that is not a slot tag is a coefficient tag
    (the cube depends on an outer infinitesimal parameter).
    """

    __slots__ = ("point", "slots", "slot_mask")

    def __init__(self, point: WeilVector, slots: Sequence[int]):
        self.point = point
        self.slots = tuple(slots)
        self.slot_mask = tagset(self.slots)

    @property
    def degree(self) -> int:
        return len(self.slots)

    @property
    def dim(self) -> int:
        return self.point.dim

    @property
    def used_tags(self) -> int:
        return self.point.active_tags | self.slot_mask

    def base(self) -> WeilVector:
        return self.point.restrict(self.slot_mask)

    def edge(self, r: int) -> WeilVector:
        """a_(r): coefficient of slot r alone (0-based), as a Weil vector."""
        bit = 1 << self.slots[r]
        smask = self.slot_mask
        return WeilVector(
            [
                WeilElement({k ^ bit: c for k, c in comp.terms.items() if k & smask == bit})
                for comp in self.point.comps
            ]
        )

    def permute(self, sigma: Permutation) -> "WeilCube":
        if sigma.n != self.degree:
            raise ArityError(f"permutation of {sigma.n} acting on a degree-{self.degree} cube")
        return WeilCube(self.point, [self.slots[sigma(j)] for j in range(self.degree)])

    def block(self, start: int, stop: int) -> "WeilCube":
        """The cube in slots start..stop-1; other slots become coefficient tags."""
        return WeilCube(self.point, self.slots[start:stop])

    def scale_i(self, alpha: float, i: int) -> "WeilCube":
        if not 1 <= i <= self.degree:
            raise IndexError(f"slot {i} outside 1..{self.degree}")
        bit = 1 << self.slots[i - 1]
        return WeilCube(
            WeilVector(
                [
                    WeilElement({k: (c * alpha if k & bit else c) for k, c in comp.terms.items()})
                    for comp in self.point.comps
                ]
            ),
            self.slots,
        )

    def push(self, f: PolyMap) -> "WeilCube":
        """f o gamma."""
        return WeilCube(f(self.point), self.slots)

    def to_microcube(self) -> Microcube:
        return Microcube.extract(self.point, self.slots)


def strong_diff(g1: Microcube, g2: Microcube, tol: float = DEFAULT_TOL) -> TangentVector:
    """g1 -. g2 for microsquares agreeing on D(2)."""
    if g1.n != 2 or g2.n != 2:
        raise DegreeError(f"strong difference needs microsquares, got degrees {g1.n}, {g2.n}")
    if g1.m != g2.m:
        raise ArityError("microsquares in different dimensions")
    for idx, name in ((0, "a_0"), (1, "a_1"), (2, "a_2")):
        gap = float(np.max(np.abs(g1.coeffs[idx] - g2.coeffs[idx])))
        if gap > tol:
            raise AgreementError(
                f"microsquares disagree on D(2): coefficient {name} differs by {gap:.3g}",
                coefficient=name,
                gap=gap,
            )
    return TangentVector(g1.coeffs[0].copy(), g1.coeffs[3] - g2.coeffs[3])


def rel_strong_diff(g1: Microcube, g2: Microcube, i: int, tol: float = DEFAULT_TOL) -> Microcube:
    """Relativized strong difference along axis i (1-based).

    The cubes are read as microsquares in the two other axes j < k with values
    in the tangent bundle along axis i.  The result is a microsquare whose
    first slot is d_i and second slot is the difference parameter e:
    (a_0, a_i, a_jk(g1) - a_jk(g2), a_123(g1) - a_123(g2)).
    """
    if g1.n != 3 or g2.n != 3:
        raise DegreeError(f"relativized strong difference needs microcubes, got degrees {g1.n}, {g2.n}")
    if i not in (1, 2, 3):
        raise IndexError(f"axis {i} outside 1..3")
    j, k = (a for a in (1, 2, 3) if a != i)
    free = {_subset_mask((j, k)), 0b111}
    for mask in range(8):
        if mask in free:
            continue
        gap = float(np.max(np.abs(g1.coeffs[mask] - g2.coeffs[mask])))
        if gap > tol:
            name = "a_" + ("".join(str(s) for s in (1, 2, 3) if mask >> (s - 1) & 1) or "0")
            raise AgreementError(
                f"relativized strong difference -{i}: coefficient {name} differs by {gap:.3g}",
                coefficient=name,
                gap=gap,
            )
    jk = _subset_mask((j, k))
    return Microcube(
        np.vstack(
            [
                g1.coeffs[0],
                g1.coeffs[1 << (i - 1)],
                g1.coeffs[jk] - g2.coeffs[jk],
                g1.coeffs[7] - g2.coeffs[7],
            ]
        )
    )


def map_push(f: PolyMap, gamma: Microcube) -> Microcube:
    """f o gamma, computed by evaluating f at the generic point of gamma."""
    if f.source_dim != gamma.m:
        raise ArityError(f"map from R^{f.source_dim} applied to a cube in R^{gamma.m}")
    tags = list(range(gamma.n))
    return Microcube.extract(f(gamma.eval([WeilElement.tag(t) for t in tags])), tags)


JACOBI_LABELS = ("123", "132", "213", "231", "312", "321")

# (axis, first pair, second pair) of the three expressions of the general
# Jacobi identity
JACOBI_EXPRESSIONS = (
    (1, ("123", "132"), ("231", "321")),
    (2, ("231", "213"), ("312", "132")),
    (3, ("312", "321"), ("123", "213")),
)


def jacobi_terms(cubes: Mapping[str, Microcube] | Sequence[Microcube], tol: float = DEFAULT_TOL):
    """Directions of the three general-Jacobi expressions."""
    if not isinstance(cubes, Mapping):
        cubes = dict(zip(JACOBI_LABELS, cubes, strict=True))
    out = []
    for axis, (a, b), (c, d) in JACOBI_EXPRESSIONS:
        try:
            left = rel_strong_diff(cubes[a], cubes[b], axis, tol)
        except AgreementError as exc:
            raise AgreementError(f"gamma_{a} -{axis} gamma_{b}: {exc}", exc.coefficient, exc.gap) from exc
        try:
            right = rel_strong_diff(cubes[c], cubes[d], axis, tol)
        except AgreementError as exc:
            raise AgreementError(f"gamma_{c} -{axis} gamma_{d}: {exc}", exc.coefficient, exc.gap) from exc
        try:
            out.append(strong_diff(left, right, tol).direction)
        except AgreementError as exc:
            raise AgreementError(
                f"outer strong difference of expression {axis}: {exc}", exc.coefficient, exc.gap
            ) from exc
    return out


def jacobi_residual(cubes: Mapping[str, Microcube] | Sequence[Microcube], tol: float = DEFAULT_TOL) -> np.ndarray:
    """Sum of the three general-Jacobi expressions (zero on admissible sextuples)."""
    t1, t2, t3 = jacobi_terms(cubes, tol)
    return t1 + t2 + t3


def random_microcube(rng: np.random.Generator, n: int, m: int, bound: float = 1.0) -> Microcube:
    return Microcube(rng.uniform(-bound, bound, size=(1 << n, m)))
