import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import const_form, field
from fncalc import oracle
from fncalc.calculus import (
    PHI_ARRANGEMENTS,
    Connection,
    FloorBracket,
    InteriorHat,
    complete_square,
    fn_bracket,
    graded_jacobi_residual,
    interior,
    lie,
    lie_decomposition,
    lie_decomposition_residual,
    pair_square,
    phi_cubes,
    phi_permutation,
    star,
    triple_phi,
    twisted_pair_square,
)
from fncalc.errors import AgreementError, DegreeError
from fncalc.forms import FormKernel, Permuted, PulledBack, VectorForm, check_base, check_homogeneity, tangent_value
from fncalc.generators import gen_connection, gen_diffeo, gen_form
from fncalc.microcube import Microcube, Permutation, TangentVector, block_permutation, random_microcube, strong_diff
from fncalc.poly import PolyExpr
from fncalc.weil import WeilElement, WeilVector

seeds = st.integers(0, 2**32 - 1)


def zero_field(m):
    return field(*[PolyExpr(m)] * m)


# ---------------------------------------------------------------- star


def test_star_of_line_fields(line_fields):
    X, Y = line_fields
    cube = Microcube.point([2.0]).to_weil()
    got = star(Y, 2, X, 1, cube)
    assert got == WeilVector([WeilElement({0: 2, 0b10: 2, 0b100: 1})])


def test_star_with_zero_field_is_outer_form(rng):
    L = gen_form(rng, 2, 1)
    g = random_microcube(rng, 1, 2)
    cube = g.to_weil()
    assert star(L, 5, zero_field(2), 4, cube).isclose(L(5, cube), 1e-12)


def test_star_constant_one_forms():
    K = const_form(2, 1, [((1,), 2, 1.0)])
    L = const_form(2, 1, [((2,), 1, 1.0)])
    g = Microcube.from_subsets(2, 2, {(1,): [1, 0], (2,): [0, 1]})
    got = star(L, 3, K, 2, g.to_weil())
    # (L_{d2} * K_{d1})(gamma) = (d2, d1)
    assert got == WeilVector([WeilElement.tag(3), WeilElement.tag(2)])


def test_star_degree_mismatch(line_fields):
    X, Y = line_fields
    with pytest.raises(DegreeError):
        star(Y, 3, X, 2, Microcube([[0.0], [1.0]]).to_weil())


# ---------------------------------------------------------------- squares and brackets


def test_squares_of_line_fields(line_fields):
    X, Y = line_fields
    g = Microcube.point([2.0])
    assert pair_square(X, Y, g) == Microcube([[2], [2], [1], [0]])
    assert twisted_pair_square(X, Y, g) == Microcube([[2], [2], [1], [1]])


def test_squares_with_zero_field(line_fields):
    X, _ = line_fields
    Z = zero_field(1)
    g = Microcube.point([2.0])
    P, T = pair_square(X, Z, g), twisted_pair_square(X, Z, g)
    assert np.array_equal(P.coeffs[2], [0]) and np.array_equal(T.coeffs[2], [0])
    assert np.array_equal(strong_diff(P, T).direction, [0])


def test_bracket_of_line_fields(line_fields):
    X, Y = line_fields
    t = fn_bracket(X, Y).tangent(Microcube.point([2.0]))
    assert np.array_equal(t.base, [2]) and np.array_equal(t.direction, [-1])
    assert np.array_equal(FloorBracket(X, X).tangent(Microcube.point([2.0])).direction, [0])


@pytest.mark.parametrize("p,q", [(0, 0), (0, 1), (1, 1), (1, 2), (2, 1)])
def test_constant_forms_commute(rng, p, q):
    K, L = gen_form(rng, 3, p, 0), gen_form(rng, 3, q, 0)
    for _ in range(3):
        g = random_microcube(rng, p + q, 3)
        assert np.abs(fn_bracket(K, L).tangent(g).direction).max() < 1e-12
        # with all higher coefficients zero the floor bracket vanishes too
        axes = tangent_value(FloorBracket(K, L), g.base, [g.coeff((r + 1,)) for r in range(p + q)])
        assert np.abs(axes.direction).max() < 1e-12


def test_floor_bracket_of_constant_forms_sees_mixed_coefficient():
    # L(K(a_12)) - K(L(a_12)) survives in the floor bracket and cancels under alternation
    K = const_form(2, 1, [((1,), 2, 1.0)])
    L = const_form(2, 1, [((2,), 1, 1.0)])
    g = Microcube.from_subsets(2, 2, {(1, 2): [3.0, 5.0]})
    assert np.array_equal(FloorBracket(K, L).tangent(g).direction, [3.0, -5.0])
    assert np.array_equal(fn_bracket(K, L).tangent(g).direction, [0.0, 0.0])


def test_constant_one_forms_bracket_vanishes():
    K = const_form(2, 1, [((1,), 2, 1.0)])
    L = const_form(2, 1, [((2,), 1, 1.0)])
    t = tangent_value(fn_bracket(K, L), [0.3, -0.2], [[1, 0], [0, 1]])
    assert np.array_equal(t.direction, [0, 0])


@pytest.mark.parametrize("p", [0, 2])
def test_self_bracket_of_even_form_vanishes(rng, p):
    K = gen_form(rng, 3, p)
    g = random_microcube(rng, 2 * p, 3)
    assert np.abs(fn_bracket(K, K).tangent(g).direction).max() < 1e-10


def test_twisted_square_uses_paper_swap():
    # the permutation in front of the twisted square, 1-based two-line bottom row
    for p, q in [(1, 2), (2, 1), (2, 3)]:
        assert block_permutation((p, q), (1, 0)) == Permutation.from_arrangement(
            list(range(p + 1, p + q + 1)) + list(range(1, p + 1))
        )


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(0, 2), st.integers(0, 2), st.integers(1, 3))
def test_pair_squares_agree_on_axes(seed, p, q, m):
    rng = np.random.default_rng(seed)
    K, L = gen_form(rng, m, p), gen_form(rng, m, q)
    g = random_microcube(rng, p + q, m)
    P, T = pair_square(K, L, g), twisted_pair_square(K, L, g)
    assert np.abs(P.coeffs[:3] - T.coeffs[:3]).max() <= 1e-10 * (1 + np.abs(P.coeffs).max())


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(0, 2), st.integers(0, 2))
def test_floor_bracket_contract(seed, p, q):
    rng = np.random.default_rng(seed)
    E = FloorBracket(gen_form(rng, 2, p), gen_form(rng, 2, q))
    assert check_base(E, trials=2, seed=seed) <= 1e-12
    assert check_homogeneity(E, trials=2, seed=seed) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(0, 2), st.integers(0, 2))
def test_permutation_commutes_with_strong_difference(seed, p, q):
    rng = np.random.default_rng(seed)
    K, L = gen_form(rng, 2, p), gen_form(rng, 2, q)
    g = random_microcube(rng, p + q, 2)
    perms = list(Permutation.all(p + q))
    sigma = perms[rng.integers(len(perms))]
    moved = g.permute(sigma)
    acted = strong_diff(pair_square(K, L, moved), twisted_pair_square(K, L, moved))
    ref = Permuted(FloorBracket(K, L), sigma).tangent(g)
    assert np.allclose(acted.direction, ref.direction, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from([(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)]), st.integers(2, 3))
def test_graded_antisymmetry(seed, pq, m):
    p, q = pq
    rng = np.random.default_rng(seed)
    K, L = gen_form(rng, m, p), gen_form(rng, m, q)
    g = random_microcube(rng, p + q, m)
    a = fn_bracket(K, L).tangent(g).direction
    b = fn_bracket(L, K).tangent(g).direction
    assert np.abs(a + (-1) ** (p * q) * b).max() <= 1e-8


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(1, 3))
def test_degree_zero_bracket_is_lie_bracket(seed, m):
    rng = np.random.default_rng(seed)
    X, Y = gen_form(rng, m, 0), gen_form(rng, m, 0)
    x = rng.uniform(-1, 1, m)
    comps = lambda V: [t.coeff for t in sorted(V.kernel.terms, key=lambda t: t.output)]  # noqa: E731
    ref = oracle.lie_bracket_classical(comps(X), comps(Y))
    got = fn_bracket(X, Y).tangent(Microcube.point(x)).direction
    assert np.abs(got - [c(x) for c in ref]).max() <= 1e-10


# ---------------------------------------------------------------- interior


def test_interior_of_identity(rng):
    Id = VectorForm(FormKernel.identity(3))
    for l in (1, 2, 3):
        L = gen_form(rng, 3, l)
        g = random_microcube(rng, l, 3)
        if l == 1:
            hat = InteriorHat(Id, L).tangent(g).direction
            assert np.allclose(hat, L.tangent(g).direction, atol=1e-12)
        got = interior(Id, L).tangent(g).direction
        assert np.allclose(got, l * L.tangent(g).direction, atol=1e-10)


def test_interior_of_zero_and_degree_errors(rng):
    K = gen_form(rng, 2, 1)
    Z = VectorForm(FormKernel(2, 1, []))
    g = random_microcube(rng, 1, 2)
    assert np.array_equal(interior(K, Z).tangent(g).direction, [0, 0])
    with pytest.raises(DegreeError):
        InteriorHat(gen_form(rng, 2, 0), K)
    with pytest.raises(DegreeError):
        InteriorHat(K, gen_form(rng, 2, 0))


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 2), st.integers(1, 2))
def test_interior_hat_is_semiform(seed, k, l):
    rng = np.random.default_rng(seed)
    hat = InteriorHat(gen_form(rng, 3, k), gen_form(rng, 3, l))
    assert check_base(hat, trials=2, seed=seed) <= 1e-12
    assert check_homogeneity(hat, trials=2, seed=seed) <= 1e-9


# ---------------------------------------------------------------- connections and Lie derivations


def test_complete_square_examples():
    flat = Connection.flat(2)
    t1 = TangentVector(np.zeros(2), np.array([1.0, 0.0]))
    t2 = TangentVector(np.zeros(2), np.array([0.0, 2.0]))
    sq = complete_square(flat, t1, t2)
    assert np.array_equal(sq.coeffs[3], [0, 0])
    nab = Connection(1, {(0, 0, 0): PolyExpr.const(1, 1.0)})
    u = TangentVector(np.zeros(1), np.ones(1))
    assert np.array_equal(complete_square(nab, u, u).coeffs[3], [1])
    with pytest.raises(AgreementError):
        complete_square(flat, t1, TangentVector(np.ones(2), np.ones(2)))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_complete_square_edges(seed):
    rng = np.random.default_rng(seed)
    nab = gen_connection(rng, 3, symmetric=False)
    x = rng.uniform(-1, 1, 3)
    t1, t2 = TangentVector(x, rng.uniform(-1, 1, 3)), TangentVector(x, rng.uniform(-1, 1, 3))
    sq = complete_square(nab, t1, t2)
    w = sq.to_weil([0, 1]).point
    assert np.array_equal(Microcube.extract(w.set_zero(1), [0]).coeffs, t1.as_microcube().coeffs)
    assert np.array_equal(Microcube.extract(w.set_zero(0), [1]).coeffs, t2.as_microcube().coeffs)


def test_connection_json_and_symmetry(tmp_path):
    nab = gen_connection(4, 2, symmetric=True)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(nab.to_json()))
    back = Connection.from_json(json.loads(path.read_text()))
    assert back.symmetric and set(back.gamma) == set(nab.gamma)
    asym = gen_connection(4, 2, symmetric=False)
    assert not asym.symmetric
    with pytest.raises(ValueError):
        Connection(2, asym.gamma, symmetric=True)


def test_lie_examples(line_fields):
    X, Y = line_fields  # X = x d/dx, Y = d/dx
    flat = Connection.flat(1)
    origin = Microcube.point([0.0])
    assert np.array_equal(lie(Y, X, flat).tangent(origin).direction, [1])
    assert np.array_equal(lie(X, Y, flat).tangent(origin).direction, [0])
    assert np.array_equal(lie(X, zero_field(1), flat).tangent(origin).direction, [0])


def test_lie_decomposition_examples(rng, line_fields):
    X, Y = line_fields
    flat = Connection.flat(1)
    gam = [Microcube.point([x]) for x in (-1.0, 0.5, 2.0)]
    assert max(lie_decomposition_residual(X, Y, flat, gam)) <= 1e-12
    nab = Connection(1, {(0, 0, 0): PolyExpr.var(1, 0)})
    for p, q in [(0, 0), (0, 1), (1, 0)]:
        K, L = gen_form(rng, 1, p), gen_form(rng, 1, q)
        cubes = [random_microcube(rng, p + q, 1) for _ in range(3)]
        assert max(lie_decomposition_residual(K, L, nab, cubes)) <= 1e-9
    K = gen_form(rng, 2, 0)
    sym = gen_connection(rng, 2)
    g = random_microcube(rng, 0, 2)
    assert np.abs(lie_decomposition(K, K, sym).tangent(g).direction).max() <= 1e-12
    with pytest.raises(ValueError):
        lie_decomposition_residual(K, K, gen_connection(rng, 2, symmetric=False), [g])


@settings(max_examples=15, deadline=None)
@given(seeds, st.sampled_from([(0, 0), (0, 1), (1, 1), (1, 2), (2, 1)]))
def test_lie_decomposition_symmetric(seed, pq):
    p, q = pq
    rng = np.random.default_rng(seed)
    K, L = gen_form(rng, 3, p), gen_form(rng, 3, q)
    nab = gen_connection(rng, 3)
    cubes = [random_microcube(rng, p + q, 3)]
    alt, floor = lie_decomposition_residual(K, L, nab, cubes)
    assert alt <= 1e-9 and floor <= 1e-9


def test_pullback_of_flat_connection_is_related(rng):
    f, f_inv = gen_diffeo(rng, 2)
    target = gen_connection(rng, 2)
    nab = target.pullback(f, f_inv)
    assert nab.symmetric
    x = rng.uniform(-1, 1, 2)
    t1, t2 = TangentVector(x, rng.uniform(-1, 1, 2)), TangentVector(x, rng.uniform(-1, 1, 2))
    from fncalc.microcube import map_push

    pushed = map_push(f, complete_square(nab, t1, t2))
    ft1 = map_push(f, t1.as_microcube())
    ft2 = map_push(f, t2.as_microcube())
    ref = complete_square(target, TangentVector(ft1.coeffs[0], ft1.coeffs[1]), TangentVector(ft2.coeffs[0], ft2.coeffs[1]))
    assert pushed.allclose(ref, 1e-9)


# ---------------------------------------------------------------- naturality


@settings(max_examples=15, deadline=None)
@given(seeds, st.sampled_from([(0, 0), (0, 1), (1, 1), (1, 2)]))
def test_naturality(seed, pq):
    p, q = pq
    rng = np.random.default_rng(seed)
    f, f_inv = gen_diffeo(rng, 2, 2, 0.5)
    K2, L2 = gen_form(rng, 2, p), gen_form(rng, 2, q)
    K, L = PulledBack(f, f_inv, K2), PulledBack(f, f_inv, L2)
    flat = Connection.flat(2)
    nab = flat.pullback(f, f_inv)
    cases = [(fn_bracket(K, L), fn_bracket(K2, L2)), (lie(K, L, nab), lie(K2, L2, flat))]
    if p >= 1 and q >= 1:
        cases.append((interior(K, L), interior(K2, L2)))
    for src, tgt in cases:
        g = random_microcube(rng, src.degree, 2)
        cube = g.to_weil()
        d = src.degree + 1
        assert f(src(d, cube)).isclose(tgt(d, cube.push(f)), 1e-8)


# ---------------------------------------------------------------- phi maps and graded Jacobi

# two-line bottom rows of the block permutations in front of the six phi maps
PAPER_SIGMA = {
    "132": lambda p, q, r: [*range(1, p + 1), *range(p + q + 1, p + q + r + 1), *range(p + 1, p + q + 1)],
    "213": lambda p, q, r: [*range(p + 1, p + q + 1), *range(1, p + 1), *range(p + q + 1, p + q + r + 1)],
    "231": lambda p, q, r: [*range(p + 1, p + q + 1), *range(p + q + 1, p + q + r + 1), *range(1, p + 1)],
    "312": lambda p, q, r: [*range(p + q + 1, p + q + r + 1), *range(1, p + 1), *range(p + 1, p + q + 1)],
    "321": lambda p, q, r: [*range(p + q + 1, p + q + r + 1), *range(p + 1, p + q + 1), *range(1, p + 1)],
}


@pytest.mark.parametrize("arrangement", sorted(PAPER_SIGMA))
def test_phi_permutations_match_tables(arrangement):
    for degrees in [(1, 2, 3), (2, 1, 1), (0, 2, 1), (3, 1, 2)]:
        want = Permutation.from_arrangement(PAPER_SIGMA[arrangement](*degrees))
        assert phi_permutation(arrangement, degrees) == want
    assert phi_permutation("123", (1, 2, 3)) == Permutation.identity(6)


def test_phi_of_zero_fields_is_constant(rng):
    Z = zero_field(2)
    g = Microcube.point([0.5, -1.0])
    for cube in phi_cubes([Z, Z, Z], g).values():
        assert np.array_equal(cube.coeffs[0], [0.5, -1.0]) and not cube.coeffs[1:].any()


def test_phi_of_translations_has_no_triple_term():
    m = 3
    fields = [field(*[PolyExpr.const(m, float(i == j)) for i in range(m)]) for j in range(m)]
    for cube in phi_cubes(fields, Microcube.point([0.0, 0.0, 0.0])).values():
        assert not cube.coeffs[7].any()


@settings(max_examples=15, deadline=None)
@given(seeds, st.sampled_from([(0, 0, 0), (0, 1, 1), (1, 1, 1), (1, 0, 2)]))
def test_phi_cubes_are_admissible(seed, pqr):
    rng = np.random.default_rng(seed)
    Ks = [gen_form(rng, 3, k, 1) for k in pqr]
    cubes = phi_cubes(Ks, random_microcube(rng, sum(pqr), 3))
    a, b = cubes["123"].coeffs, cubes["132"].coeffs
    # agree except on the (d2, d3)-mixed slots 0b110 and 0b111
    scale = 1 + np.abs(a).max()
    assert np.abs(a[:6] - b[:6]).max() <= 1e-10 * scale
    from fncalc.microcube import jacobi_terms

    assert np.abs(sum(jacobi_terms(cubes, tol=1e-9 * scale))).max() <= 1e-9 * scale


def test_graded_jacobi_vector_fields(rng):
    Ks = [gen_form(rng, 2, 0) for _ in range(3)]
    cubes = [random_microcube(rng, 0, 2) for _ in range(3)]
    res = graded_jacobi_residual(*Ks, cubes)
    assert max(res.values()) <= 1e-9


def test_graded_jacobi_with_vanishing_inner_bracket(rng):
    K1, K2 = gen_form(rng, 3, 1), gen_form(rng, 3, 0)
    cubes = [random_microcube(rng, 1, 3)]
    assert np.abs(fn_bracket(K2, K2).tangent(random_microcube(rng, 0, 3)).direction).max() <= 1e-12
    assert max(graded_jacobi_residual(K1, K2, K2, cubes).values()) <= 1e-9


@pytest.mark.parametrize("m", [2, 3])
def test_graded_jacobi_one_forms(rng, m):
    Ks = [gen_form(rng, m, 1, 1) for _ in range(3)]
    cubes = [random_microcube(rng, 3, m) for _ in range(2)]
    assert max(graded_jacobi_residual(*Ks, cubes).values()) <= 1e-8


def test_graded_jacobi_detects_sign_flip(rng):
    Ks = [gen_form(rng, 3, 1, 1) for _ in range(3)]
    cubes = [random_microcube(rng, 3, 3)]
    assert graded_jacobi_residual(*Ks, cubes, intermediate=False, flip=True)["jacobi"] > 1e-3


def test_triple_phi_rejects_unknown_arrangement(rng):
    Ks = [gen_form(rng, 2, 0)] * 3
    with pytest.raises(ValueError):
        triple_phi(Ks, "122", Microcube.point([0.0, 0.0]).to_weil(), (0, 1, 2))
    assert set(PHI_ARRANGEMENTS) == {"123", "132", "213", "231", "312", "321"}
