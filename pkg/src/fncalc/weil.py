"""Square-free nilpotent arithmetic: R[e_0, ..., e_63] / (e_i^2).

A monomial is a set of tags stored as an int bitmask; an element is a sparse
map from monomial to real coefficient.  Multiplication drops every product of
two monomials that share a tag, which is exactly the rule e_i * e_i = 0.
"""

from __future__ import annotations

from typing import Dict, Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import CapacityError, ContaminationError

MAX_TAGS = 64

Scalar = Union[int, float]


def tag_bit(t: int) -> int:
    """Bitmask of a single tag; rejects indices outside the 64-tag word."""
    if not 0 <= t < MAX_TAGS:
        raise CapacityError(f"tag index {t} outside [0, {MAX_TAGS})")
    return 1 << t


def tagset(tags: Iterable[int]) -> int:
    mask = 0
    for t in tags:
        mask |= tag_bit(t)
    return mask


def tags_of(mask: int) -> list:
    """Tags contained in a bitmask, ascending."""
    out = []
    t = 0
    while mask:
        if mask & 1:
            out.append(t)
        mask >>= 1
        t += 1
    return out


def fresh_tags(count: int, used: int) -> list:
    """The `count` lowest tags not present in the mask `used`."""
    out = []
    t = 0
    while len(out) < count:
        if t >= MAX_TAGS:
            raise CapacityError(f"tag budget exhausted: needed {count} free tags")
        if not used >> t & 1:
            out.append(t)
        t += 1
    return out


class WeilElement:
    """An element of the square-free Weil algebra with real coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[int, float] | None = None):
        self.terms: Dict[int, float] = terms if terms is not None else {}

    @classmethod
    def const(cls, c: Scalar) -> "WeilElement":
        return cls({0: float(c)}) if c else cls()

    @classmethod
    def tag(cls, t: int, coeff: Scalar = 1.0) -> "WeilElement":
        return cls({tag_bit(t): float(coeff)})

    @property
    def active_tags(self) -> int:
        mask = 0
        for k in self.terms:
            mask |= k
        return mask

    @property
    def real(self) -> float:
        """Constant term, i.e. the value with every tag set to 0."""
        return self.terms.get(0, 0.0)

    def coeff(self, monomial: Union[int, Iterable[int]]) -> float:
        if not isinstance(monomial, int):
            monomial = tagset(monomial)
        return self.terms.get(monomial, 0.0)

    def set_zero(self, t: int) -> "WeilElement":
        """Substitute 0 for tag t."""
        return self.restrict(tag_bit(t))

    def restrict(self, mask: int) -> "WeilElement":
        """Substitute 0 for every tag in `mask`."""
        return WeilElement({k: c for k, c in self.terms.items() if not k & mask})

    def cofactor(self, mask: int) -> "WeilElement":
        """Monomials divisible by `mask`, with `mask` divided out."""
        return WeilElement({k ^ mask: c for k, c in self.terms.items() if k & mask == mask})

    def times_tag(self, t: int) -> "WeilElement":
        bit = tag_bit(t)
        out = {}
        for k, c in self.terms.items():
            if not k & bit:
                out[k | bit] = c
        return WeilElement(out)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def isclose(self, other: "WeilElement", tol: float = 1e-9) -> bool:
        return (self - other).max_abs() <= tol

    def __add__(self, other):
        if not isinstance(other, WeilElement):
            other = WeilElement.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return WeilElement(out)

    __radd__ = __add__

    def __neg__(self) -> "WeilElement":
        return WeilElement({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, WeilElement):
            other = WeilElement.const(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) - c
        return WeilElement(out)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, WeilElement):
            a = float(other)
            if a == 0.0:
                return WeilElement()
            return WeilElement({k: a * c for k, c in self.terms.items()})
        out: Dict[int, float] = {}
        get = out.get
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                if ka & kb:
                    continue
                k = ka | kb
                out[k] = get(k, 0.0) + ca * cb
        return WeilElement(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "WeilElement":
        out = WeilElement.const(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeilElement):
            other = WeilElement.const(other)
        keys = set(self.terms) | set(other.terms)
        return all(self.terms.get(k, 0.0) == other.terms.get(k, 0.0) for k in keys)

    __hash__ = None

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: (bin(k).count("1"), k)):
            mono = "".join(f"e{t}" for t in tags_of(k))
            parts.append(f"{self.terms[k]:g}{mono}")
        return " + ".join(parts)


class WeilVector:
    """A point of R^m with Weil-valued coordinates."""

    __slots__ = ("comps",)

    def __init__(self, comps: Sequence[WeilElement]):
        self.comps = tuple(comps)

    @classmethod
    def zeros(cls, m: int) -> "WeilVector":
        return cls([WeilElement() for _ in range(m)])

    @classmethod
    def from_real(cls, values) -> "WeilVector":
        return cls([WeilElement.const(float(v)) for v in values])

    @property
    def dim(self) -> int:
        return len(self.comps)

    @property
    def active_tags(self) -> int:
        mask = 0
        for c in self.comps:
            mask |= c.active_tags
        return mask

    def __len__(self) -> int:
        return len(self.comps)

    def __iter__(self) -> Iterator[WeilElement]:
        return iter(self.comps)

    def __getitem__(self, i: int) -> WeilElement:
        return self.comps[i]

    def coeff(self, monomial: Union[int, Iterable[int]]) -> np.ndarray:
        if not isinstance(monomial, int):
            monomial = tagset(monomial)
        return np.array([c.terms.get(monomial, 0.0) for c in self.comps])

    def real(self) -> np.ndarray:
        return self.coeff(0)

    def to_real(self) -> np.ndarray:
        """Constant vector; raises if any nilpotent part survives."""
        if any(k for c in self.comps for k, v in c.terms.items() if v != 0.0):
            raise ContaminationError("vector still carries nilpotent tags")
        return self.real()

    def set_zero(self, t: int) -> "WeilVector":
        return self.restrict(tag_bit(t))

    def restrict(self, mask: int) -> "WeilVector":
        return WeilVector([c.restrict(mask) for c in self.comps])

    def cofactor(self, mask: int) -> "WeilVector":
        return WeilVector([c.cofactor(mask) for c in self.comps])

    def times_tag(self, t: int) -> "WeilVector":
        return WeilVector([c.times_tag(t) for c in self.comps])

    def split(self, t: int):
        """(value at t=0, coefficient of t): the base and direction along tag t."""
        bit = tag_bit(t)
        return self.restrict(bit), self.cofactor(bit)

    def max_abs(self) -> float:
        return max((c.max_abs() for c in self.comps), default=0.0)

    def isclose(self, other: "WeilVector", tol: float = 1e-9) -> bool:
        return (self - other).max_abs() <= tol

    def __add__(self, other: "WeilVector") -> "WeilVector":
        return WeilVector([a + b for a, b in zip(self.comps, other.comps, strict=True)])

    def __sub__(self, other: "WeilVector") -> "WeilVector":
        return WeilVector([a - b for a, b in zip(self.comps, other.comps, strict=True)])

    def __neg__(self) -> "WeilVector":
        return WeilVector([-a for a in self.comps])

    def __mul__(self, scalar) -> "WeilVector":
        return WeilVector([a * scalar for a in self.comps])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, WeilVector) and len(self) == len(other) and all(
            a == b for a, b in zip(self.comps, other.comps)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return "(" + ", ".join(repr(c) for c in self.comps) + ")"
