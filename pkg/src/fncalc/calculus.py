"""Operators built from forms: star composition, brackets, interior and Lie derivations.

All operators are evaluators in the sense of `fncalc.forms`; nested operators
(a bracket whose argument is itself a bracket) are composition trees that are
evaluated by passing Weil-valued cubes down the tree.  Temporary tags are taken
as the lowest tags unused by the cube and the evaluation tag, so a run is
deterministic.
"""

from __future__ import annotations

import math
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from .errors import AgreementError, ArityError, ConsistencyError, DegreeError
from .forms import Alternation, Combination, SemiForm
from .microcube import DEFAULT_TOL, Microcube, TangentVector, WeilCube, block_permutation
from .poly import PolyExpr, PolyMap, PowerCache, eval_poly
from .weil import WeilElement, WeilVector, fresh_tags, tag_bit


def _agreement_scale(*vs: WeilVector) -> float:
    return 1.0 + max(v.max_abs() for v in vs)


def weil_strong_diff(P: WeilVector, T: WeilVector, t1: int, t2: int, tol: float = DEFAULT_TOL, what: str = "squares"):
    """Strong difference of two Weil-valued microsquares in tags (t1, t2).

    Returns (base, direction).  Disagreement off the mixed monomial raises
    ConsistencyError: callers use this only where agreement is guaranteed.
    """
    mask = tag_bit(t1) | tag_bit(t2)
    diff = P - T
    limit = tol * _agreement_scale(P, T)
    for j, comp in enumerate(diff.comps):
        for k, c in comp.terms.items():
            if k & mask != mask and abs(c) > limit:
                raise ConsistencyError(f"{what} disagree on D(2): component {j}, monomial {k:#x}, gap {abs(c):.3g}")
    return P.restrict(mask), diff.cofactor(mask)


def _split_blocks(cube: WeilCube, size: int) -> Tuple[WeilCube, Tuple[int, ...]]:
    return cube.block(0, size), cube.slots[size:]


def star(psi: SemiForm, d_psi: int, phi: SemiForm, d_phi: int, cube: WeilCube) -> WeilVector:
    """(psi_{d_psi} * phi_{d_phi})(gamma): phi on the first phi.degree slots, psi on the rest."""
    if phi.degree + psi.degree != cube.degree:
        raise DegreeError(f"star of degrees {psi.degree}, {phi.degree} on a degree-{cube.degree} cube")
    inner, rest = _split_blocks(cube, phi.degree)
    return psi(d_psi, WeilCube(phi(d_phi, inner), rest))


def _pair(K: SemiForm, L: SemiForm, cube: WeilCube, d1: int, d2: int) -> WeilVector:
    """(L * K)(d1, d2)(gamma) = L_{d2} * K_{d1}."""
    return star(L, d2, K, d1, cube)


def _twisted(K: SemiForm, L: SemiForm, cube: WeilCube, d1: int, d2: int, permute: bool = True) -> WeilVector:
    """(K ~* L)(d1, d2)(gamma) = (K_{d1} * L_{d2})(gamma^sigma), sigma the (p, q) block swap."""
    if permute:
        cube = cube.permute(block_permutation((K.degree, L.degree), (1, 0)))
    return star(K, d1, L, d2, cube)


def _square(make, gamma: Microcube) -> Microcube:
    cube = gamma.to_weil()
    d1, d2 = fresh_tags(2, cube.used_tags)
    return Microcube.extract(make(cube, d1, d2), (d1, d2))


def pair_square(K: SemiForm, L: SemiForm, gamma: Microcube) -> Microcube:
    """The microsquare (d1, d2) -> (L_{d2} * K_{d1})(gamma)."""
    return _square(lambda c, d1, d2: _pair(K, L, c, d1, d2), gamma)


def twisted_pair_square(K: SemiForm, L: SemiForm, gamma: Microcube) -> Microcube:
    """The microsquare (d1, d2) -> (K_{d1} * L_{d2})(gamma^sigma)."""
    return _square(lambda c, d1, d2: _twisted(K, L, c, d1, d2), gamma)


class FloorBracket(SemiForm):
    """The semiform (L * K) -. (K ~* L) of degree p + q."""

    def __init__(self, K: SemiForm, L: SemiForm, permute: bool = True):
        if K.dim != L.dim:
            raise ArityError("bracket of forms on different spaces")
        self.K, self.L = K, L
        self.p, self.q = K.degree, L.degree
        self.degree, self.dim = K.degree + L.degree, K.dim
        self.permute = permute

    def squares(self, d: int, cube: WeilCube):
        d1, d2 = fresh_tags(2, cube.used_tags | tag_bit(d))
        P = _pair(self.K, self.L, cube, d1, d2)
        T = _twisted(self.K, self.L, cube, d1, d2, self.permute)
        return P, T, d1, d2

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        P, T, d1, d2 = self.squares(d, cube)
        base, direction = weil_strong_diff(P, T, d1, d2, what="L*K and K~*L")
        return base + direction.times_tag(d)


def bracket_floor(K: SemiForm, L: SemiForm) -> FloorBracket:
    return FloorBracket(K, L)


def fn_bracket(K: SemiForm, L: SemiForm) -> Alternation:
    """The Froelicher-Nijenhuis bracket A_{p,q} of the floor bracket."""
    return Alternation(FloorBracket(K, L), (K.degree, L.degree))


class InteriorHat(SemiForm):
    """L{(e_1..e_l) -> K_{e_1}(first k+1 slots of gamma, remaining slots e_2..e_l)}."""

    def __init__(self, K: SemiForm, L: SemiForm):
        if K.degree < 1:
            raise DegreeError("interior derivation needs K of degree >= 1")
        if L.degree < 1:
            raise DegreeError("interior derivation needs L of degree >= 1")
        if K.dim != L.dim:
            raise ArityError("forms on different spaces")
        self.K, self.L = K, L
        self.degree, self.dim = K.degree + L.degree - 1, K.dim

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        (e1,) = fresh_tags(1, cube.used_tags | tag_bit(d))
        inner, rest = _split_blocks(cube, self.K.degree)
        return self.L(d, WeilCube(self.K(e1, inner), (e1,) + rest))


def interior_hat(K: SemiForm, L: SemiForm) -> InteriorHat:
    return InteriorHat(K, L)


def interior(K: SemiForm, L: SemiForm) -> Alternation:
    """i_K L = A_{k+1, l-1}(i^_K L) for K of degree k+1 and L of degree l."""
    return Alternation(InteriorHat(K, L), (K.degree, L.degree - 1))


class Connection:
    """Christoffel data: the completion of (t1, t2) at x has mixed term Gamma_x(v1, v2).

    Gamma_x(v1, v2)^k = sum_ij gamma[k][i][j](x) v1^i v2^j.
    """

    def __init__(self, dim: int, gamma: Mapping[Tuple[int, int, int], PolyExpr] | None = None, symmetric: bool | None = None):
        self.dim = dim
        self.gamma: Dict[Tuple[int, int, int], PolyExpr] = {}
        for (k, i, j), c in (gamma or {}).items():
            if not all(0 <= a < dim for a in (k, i, j)):
                raise ArityError(f"Christoffel index {(k + 1, i + 1, j + 1)} out of range")
            if c.nvars != dim:
                raise ArityError("Christoffel coefficient in the wrong number of variables")
            if not c.is_zero():
                key = (k, i, j)
                self.gamma[key] = self.gamma[key] + c if key in self.gamma else c
        actual = self._is_symmetric()
        if symmetric and not actual:
            raise ValueError("connection declared symmetric but Gamma^k_ij != Gamma^k_ji")
        self.symmetric = actual if symmetric is None else bool(symmetric)

    def _is_symmetric(self) -> bool:
        zero = PolyExpr(self.dim)
        for (k, i, j), c in self.gamma.items():
            if not c.isclose(self.gamma.get((k, j, i), zero)):
                return False
        return True

    @classmethod
    def flat(cls, dim: int) -> "Connection":
        return cls(dim, {}, symmetric=True)

    def mixed(self, x: WeilVector, v1: WeilVector, v2: WeilVector) -> WeilVector:
        """Gamma_x(v1, v2), all arguments possibly Weil-valued."""
        cache = PowerCache(x.comps)
        out = [WeilElement() for _ in range(self.dim)]
        for (k, i, j), c in self.gamma.items():
            prod = v1.comps[i] * v2.comps[j]
            if prod.terms:
                out[k] = out[k] + eval_poly(c, x.comps, cache) * prod
        return WeilVector(out)

    def complete(self, x: WeilVector, v1: WeilVector, v2: WeilVector, t1: int, t2: int) -> WeilVector:
        """The Weil-valued microsquare x + t1 v1 + t2 v2 + t1 t2 Gamma_x(v1, v2)."""
        return x + v1.times_tag(t1) + v2.times_tag(t2) + self.mixed(x, v1, v2).times_tag(t1).times_tag(t2)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "symmetric": self.symmetric,
            "gamma": [
                {"upper": k + 1, "lower": [i + 1, j + 1], "coeff": c.to_json()}
                for (k, i, j), c in sorted(self.gamma.items())
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Connection":
        dim = int(obj["dim"])
        data: Dict[Tuple[int, int, int], PolyExpr] = {}
        for g in obj.get("gamma", []):
            i, j = g["lower"]
            key = (int(g["upper"]) - 1, int(i) - 1, int(j) - 1)
            c = PolyExpr.from_json(g["coeff"], dim)
            data[key] = data[key] + c if key in data else c
        return cls(dim, data, symmetric=bool(obj.get("symmetric", False)))

    def pullback(self, f: PolyMap, f_inv: PolyMap) -> "Connection":
        """The connection on the source of f to which this one is f-related.

        Solves f o nabla(t1, t2) = nabla'(f o t1, f o t2) for Gamma:
        Gamma_x(v1, v2) = J^{-1} (Gamma'_{f(x)}(J v1, J v2) - H_x(v1, v2)).
        """
        m = self.dim
        J = f.jacobian()
        H = f.hessian()
        jinv_at_f = [[c.compose(f.components) for c in row] for row in f_inv.jacobian()]
        shifted = {key: c.compose(f.components) for key, c in self.gamma.items()}
        zero = PolyExpr(m)
        inner = {}
        for l in range(m):
            for i in range(m):
                for j in range(m):
                    acc = -H[l][i][j]
                    for (kk, a, b), c in shifted.items():
                        if kk == l:
                            acc = acc + c * J[a][i] * J[b][j]
                    inner[(l, i, j)] = acc
        out = {}
        for k in range(m):
            for i in range(m):
                for j in range(m):
                    acc = zero
                    for l in range(m):
                        acc = acc + jinv_at_f[k][l] * inner[(l, i, j)]
                    if not acc.is_zero():
                        out[(k, i, j)] = acc
        return Connection(m, out, symmetric=self.symmetric)


def complete_square(nabla: Connection, t1: TangentVector, t2: TangentVector, tol: float = DEFAULT_TOL) -> Microcube:
    """nabla(t1, t2) as a real microsquare."""
    gap = float(np.max(np.abs(t1.base - t2.base)))
    if gap > tol:
        raise AgreementError(f"tangent vectors at different points (gap {gap:.3g})", "base", gap)
    x, v1, v2 = (WeilVector.from_real(a) for a in (t1.base, t1.direction, t2.direction))
    return Microcube(np.vstack([t1.base, t1.direction, t2.direction, nabla.mixed(x, v1, v2).to_real()]))


class LieHat(SemiForm):
    """(L * K)(gamma) -. nabla((L * K)(gamma))."""

    def __init__(self, K: SemiForm, L: SemiForm, nabla: Connection):
        if not K.dim == L.dim == nabla.dim:
            raise ArityError("forms and connection on different spaces")
        self.K, self.L, self.nabla = K, L, nabla
        self.degree, self.dim = K.degree + L.degree, K.dim

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        d1, d2 = fresh_tags(2, cube.used_tags | tag_bit(d))
        P = _pair(self.K, self.L, cube, d1, d2)
        b1, b2 = tag_bit(d1), tag_bit(d2)
        x = P.restrict(b1 | b2)
        v1 = P.restrict(b2).cofactor(b1)
        v2 = P.restrict(b1).cofactor(b2)
        C = self.nabla.complete(x, v1, v2, d1, d2)
        base, direction = weil_strong_diff(P, C, d1, d2, what="L*K and its connection completion")
        return base + direction.times_tag(d)


def lie_hat(K: SemiForm, L: SemiForm, nabla: Connection) -> LieHat:
    return LieHat(K, L, nabla)


def lie(K: SemiForm, L: SemiForm, nabla: Connection) -> Alternation:
    """L^nabla_K L = A_{k,l} of the hatted Lie derivation."""
    return Alternation(LieHat(K, L, nabla), (K.degree, L.degree))


def lie_decomposition(K: SemiForm, L: SemiForm, nabla: Connection) -> Combination:
    """L^nabla_K L - (-1)^{kl} L^nabla_L K, which equals the FN bracket for symmetric nabla."""
    s = (-1) ** (K.degree * L.degree)
    return Combination([(1.0, lie(K, L, nabla)), (-s, lie(L, K, nabla))])


def floor_lie_decomposition(K: SemiForm, L: SemiForm, nabla: Connection) -> Combination:
    """Unalternated form: hat-L_K L - (hat-L_L K)^sigma, sigma the (k, l) block swap."""
    from .forms import Permuted

    sigma = block_permutation((K.degree, L.degree), (1, 0))
    return Combination([(1.0, LieHat(K, L, nabla)), (-1.0, Permuted(LieHat(L, K, nabla), sigma))])


def _max_gap(E1: SemiForm, E2: SemiForm, cubes) -> float:
    worst = 0.0
    for gamma in cubes:
        a, b = E1.tangent(gamma), E2.tangent(gamma)
        worst = max(worst, float(np.max(np.abs(a.direction - b.direction), initial=0.0)))
        worst = max(worst, float(np.max(np.abs(a.base - b.base), initial=0.0)))
    return worst


def lie_decomposition_residual(K: SemiForm, L: SemiForm, nabla: Connection, cubes) -> Tuple[float, float]:
    """(alternated gap, floor-level gap) of the decomposition over the given cubes."""
    if not nabla.symmetric:
        raise ValueError("the decomposition is asserted only for symmetric connections")
    cubes = list(cubes)
    alternated = _max_gap(fn_bracket(K, L), lie_decomposition(K, L, nabla), cubes)
    floor = _max_gap(FloorBracket(K, L), floor_lie_decomposition(K, L, nabla), cubes)
    return alternated, floor


PHI_ARRANGEMENTS = ("123", "132", "213", "231", "312", "321")


def phi_permutation(arrangement: str, degrees: Sequence[int]):
    """sigma_ijk: bring the blocks of K_i, K_j, K_k to the front in that order."""
    return block_permutation(degrees, [int(c) - 1 for c in arrangement])


def triple_phi(Ks: Sequence[SemiForm], arrangement: str, cube: WeilCube, tags: Sequence[int]) -> WeilVector:
    """phi_ijk(t_1, t_2, t_3)(gamma): K_i, then K_j, then K_k applied blockwise to gamma^sigma_ijk.

    K_a is always evaluated at tags[a], so the result is a microcube in
    (t_1, t_2, t_3) whatever the arrangement.
    """
    if arrangement not in PHI_ARRANGEMENTS:
        raise ValueError(f"unknown arrangement {arrangement!r}")
    degrees = [K.degree for K in Ks]
    if sum(degrees) != cube.degree:
        raise DegreeError(f"degrees {degrees} on a degree-{cube.degree} cube")
    cube = cube.permute(phi_permutation(arrangement, degrees))
    point, slots = cube.point, cube.slots
    for c in arrangement:
        a = int(c) - 1
        n = Ks[a].degree
        point = Ks[a](tags[a], WeilCube(point, slots[:n]))
        slots = slots[n:]
    return point


def phi_cubes(Ks: Sequence[SemiForm], gamma: Microcube) -> Dict[str, Microcube]:
    """The six phi-microcubes at a real cube gamma."""
    cube = gamma.to_weil()
    tags = fresh_tags(3, cube.used_tags)
    return {a: Microcube.extract(triple_phi(Ks, a, cube, tags), tags) for a in PHI_ARRANGEMENTS}


def weil_rel_strong_diff(A: WeilVector, B: WeilVector, tags: Sequence[int], axis: int, e: int) -> WeilVector:
    """Relativized strong difference of Weil-valued microcubes; result is a square in (t_axis, e)."""
    others = [t for a, t in enumerate(tags, start=1) if a != axis]
    mask = tag_bit(others[0]) | tag_bit(others[1])
    diff = A - B
    limit = DEFAULT_TOL * _agreement_scale(A, B)
    for j, comp in enumerate(diff.comps):
        for k, c in comp.terms.items():
            if k & mask != mask and abs(c) > limit:
                raise ConsistencyError(f"phi-cubes not admissible for -{axis}: component {j}, gap {abs(c):.3g}")
    return A.restrict(mask) + diff.cofactor(mask).times_tag(e)


# (axis, first pair, second pair) of the general Jacobi identity
_EXPRESSIONS = {
    1: (("123", "132"), ("231", "321")),
    2: (("231", "213"), ("312", "132")),
    3: (("312", "321"), ("123", "213")),
}


class PhiJacobiTerm(SemiForm):
    """gamma -> (phi_a -._i phi_b) -. (phi_c -._i phi_d) for expression i of the general Jacobi identity."""

    def __init__(self, K1: SemiForm, K2: SemiForm, K3: SemiForm, expression: int = 1):
        if expression not in _EXPRESSIONS:
            raise ValueError("expression must be 1, 2 or 3")
        self.Ks = (K1, K2, K3)
        self.expression = expression
        self.degree, self.dim = sum(K.degree for K in self.Ks), K1.dim

    def __call__(self, d: int, cube: WeilCube) -> WeilVector:
        self._check(d, cube)
        t1, t2, t3, e = fresh_tags(4, cube.used_tags | tag_bit(d))
        tags = (t1, t2, t3)
        (a, b), (c, dd) = _EXPRESSIONS[self.expression]
        phis = {x: triple_phi(self.Ks, x, cube, tags) for x in {a, b, c, dd}}
        axis = self.expression
        left = weil_rel_strong_diff(phis[a], phis[b], tags, axis, e)
        right = weil_rel_strong_diff(phis[c], phis[dd], tags, axis, e)
        base, direction = weil_strong_diff(left, right, tags[axis - 1], e, what="relativized differences")
        return base + direction.times_tag(d)


def graded_jacobi_terms(K1: SemiForm, K2: SemiForm, K3: SemiForm):
    """([K1,[K2,K3]], sign2, [K2,[K3,K1]], sign3, [K3,[K1,K2]]) as evaluators and signs."""
    p, q, r = K1.degree, K2.degree, K3.degree
    return (
        (1, fn_bracket(K1, fn_bracket(K2, K3))),
        ((-1) ** (p * (q + r)), fn_bracket(K2, fn_bracket(K3, K1))),
        ((-1) ** (r * (p + q)), fn_bracket(K3, fn_bracket(K1, K2))),
    )


def graded_jacobi_residual(K1: SemiForm, K2: SemiForm, K3: SemiForm, cubes, intermediate: bool = True, flip: bool = False):
    """Residuals of the graded Jacobi identity and of its proof steps, maxed over cubes.

    Keys: "jacobi" (the identity itself), "phi_identity_1..3" (each signed
    double bracket against A_{p,q,r} of the matching phi expression),
    "assoc" (A_{p,q+r}[K1, A_{q,r}[K2,K3]] vs A_{p,q,r}[K1,[K2,K3]] at floor
    level) and "phi_general_jacobi" (pointwise sum of the phi expressions).
    `flip` negates the second sign; it is a planted bug for the self-test.
    """
    terms = graded_jacobi_terms(K1, K2, K3)
    blocks = (K1.degree, K2.degree, K3.degree)
    if intermediate:
        phis = [Alternation(PhiJacobiTerm(K1, K2, K3, i), blocks) for i in (1, 2, 3)]
        phi_raw = [PhiJacobiTerm(K1, K2, K3, i) for i in (1, 2, 3)]
        assoc_rhs = Alternation(FloorBracket(K1, FloorBracket(K2, K3)), blocks)
    out = {"jacobi": 0.0}
    if intermediate:
        out.update({"phi_identity_1": 0.0, "phi_identity_2": 0.0, "phi_identity_3": 0.0, "assoc": 0.0, "phi_general_jacobi": 0.0})
    for gamma in cubes:
        dirs = [s * E.tangent(gamma).direction for s, E in terms]
        if flip:
            dirs[1] = -dirs[1]
        out["jacobi"] = max(out["jacobi"], float(np.max(np.abs(sum(dirs)), initial=0.0)))
        if not intermediate:
            continue
        for i in range(3):
            got = phis[i].tangent(gamma).direction
            out[f"phi_identity_{i + 1}"] = max(out[f"phi_identity_{i + 1}"], float(np.max(np.abs(got - dirs[i]), initial=0.0)))
        got = assoc_rhs.tangent(gamma).direction
        out["assoc"] = max(out["assoc"], float(np.max(np.abs(got - dirs[0]), initial=0.0)))
        total = sum(E.tangent(gamma).direction for E in phi_raw)
        out["phi_general_jacobi"] = max(out["phi_general_jacobi"], float(np.max(np.abs(total), initial=0.0)))
    return out


def factorial_weight(*blocks: int) -> float:
    return 1.0 / math.prod(math.factorial(b) for b in blocks)
