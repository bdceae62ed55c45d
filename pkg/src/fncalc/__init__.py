"""Synthetic Froelicher-Nijenhuis calculus on R^m, evaluated in square-free Weil algebras."""

from .calculus import (
    Connection,
    FloorBracket,
    InteriorHat,
    LieHat,
    complete_square,
    fn_bracket,
    interior,
    lie,
    pair_square,
    star,
    triple_phi,
    twisted_pair_square,
)
from .forms import Alternation, FormKernel, KernelTerm, SemiForm, VectorForm, alternate, pullback_related
from .microcube import Microcube, Permutation, TangentVector, WeilCube, jacobi_residual, rel_strong_diff, strong_diff
from .poly import PolyExpr, PolyMap
from .weil import WeilElement, WeilVector

__all__ = [
    "Connection",
    "FloorBracket",
    "InteriorHat",
    "LieHat",
    "complete_square",
    "fn_bracket",
    "interior",
    "lie",
    "pair_square",
    "star",
    "triple_phi",
    "twisted_pair_square",
    "Alternation",
    "FormKernel",
    "KernelTerm",
    "SemiForm",
    "VectorForm",
    "alternate",
    "pullback_related",
    "Microcube",
    "Permutation",
    "TangentVector",
    "WeilCube",
    "jacobi_residual",
    "rel_strong_diff",
    "strong_diff",
    "PolyExpr",
    "PolyMap",
    "WeilElement",
    "WeilVector",
]

__version__ = "0.1.0"
