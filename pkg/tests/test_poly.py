import numpy as np
import pytest

from fncalc.errors import ArityError, InverseError
from fncalc.poly import PolyExpr, PolyMap, all_exponents
from fncalc.weil import WeilElement, WeilVector


def test_rejects_bad_exponents():
    with pytest.raises(ArityError):
        PolyExpr(2, {(1,): 1.0})
    with pytest.raises(ValueError):
        PolyExpr(1, {(-1,): 1.0})


def test_merges_and_drops_zero_terms():
    p = PolyExpr.from_terms(1, [((1,), 2.0), ((1,), -2.0), ((0,), 3.0)])
    assert p.terms == {(0,): 3.0}


def test_derivative_and_compose():
    x, y = PolyExpr.var(2, 0), PolyExpr.var(2, 1)
    p = x * x * y + 3 * y
    assert p.derivative(0).isclose(2 * x * y)
    assert p.derivative(1).isclose(x * x + 3)
    q = p.compose([x + y, x - y])
    assert q([1.0, 2.0]) == pytest.approx(p([3.0, -1.0]))


def test_json_round_trip_and_duplicates():
    p = PolyExpr(2, {(1, 0): 1.5, (0, 2): -2.0})
    assert PolyExpr.from_json(p.to_json(), 2).isclose(p)
    dup = {"terms": [{"exponents": [1, 0], "coefficient": 1}, {"exponents": [1, 0], "coefficient": 2}]}
    with pytest.raises(ValueError):
        PolyExpr.from_json(dup, 2)


def test_polymap_weil_evaluation_matches_jacobian():
    x, y = PolyExpr.var(2, 0), PolyExpr.var(2, 1)
    f = PolyMap([x * y, x + y * y])
    pt = WeilVector([WeilElement.const(1.0) + WeilElement.tag(0), WeilElement.const(2.0) + WeilElement.tag(0, 3.0)])
    out = f(pt)
    J = np.array([[c([1.0, 2.0]) for c in row] for row in f.jacobian()])
    assert np.allclose(out.coeff(1), J @ [1.0, 3.0])
    assert np.allclose(out.real(), f([1.0, 2.0]))


def test_validate_inverse():
    x, y = PolyExpr.var(2, 0), PolyExpr.var(2, 1)
    f = PolyMap([x, y + x * x])
    g = PolyMap([x, y - x * x])
    pts = np.random.default_rng(0).uniform(-1, 1, (10, 2))
    assert f.validate_inverse(g, pts) < 1e-12
    with pytest.raises(InverseError):
        f.validate_inverse(PolyMap.identity(2), pts)
    assert PolyMap.from_json(f.to_json()).compose(g)(np.array([0.3, 0.4])) == pytest.approx([0.3, 0.4])


def test_hessian():
    x, y = PolyExpr.var(2, 0), PolyExpr.var(2, 1)
    H = PolyMap([x * x * y]).hessian()[0]
    assert H[0][1].isclose(2 * x) and H[1][1].is_zero()


def test_all_exponents():
    assert len(all_exponents(2, 2)) == 6
