"""Property suites: each checks one identity over seeded random trials and reports the worst residual.

Trial t of a run with seed s draws all its inputs from default_rng(s ^ t), so
a report depends only on the configuration.  Every suite has a mutation flag
that plants a bug the suite is meant to catch; a mutated run must FAIL.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from . import oracle
from .calculus import (
    Connection,
    FloorBracket,
    InteriorHat,
    fn_bracket,
    graded_jacobi_residual,
    interior,
    lie,
    lie_decomposition_residual,
    pair_square,
    twisted_pair_square,
)
from .errors import AgreementError, ConsistencyError, FNCalcError
from .forms import (
    Alternation,
    FormKernel,
    Permuted,
    PulledBack,
    SemiForm,
    VectorForm,
    check_alternating,
    check_base,
    check_homogeneity,
)
from .generators import gen_connection, gen_diffeo, gen_form, gen_microcube, gen_poly, gen_sextuple
from .microcube import Microcube, Permutation, jacobi_terms, map_push, strong_diff
from .poly import PolyMap
from .weil import WeilVector, fresh_tags


@dataclass
class SuiteConfig:
    suite: str
    dim: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    r: Optional[int] = None
    trials: Optional[int] = None
    seed: int = 0
    tol: Optional[float] = None
    bound: float = 1.0
    poly_degree: int = 2
    mutate: bool = False

    def resolved(self) -> "SuiteConfig":
        """Fill unset fields from the suite defaults and validate."""
        if self.suite not in SUITES:
            raise KeyError(f"unknown suite {self.suite!r}")
        spec = SUITES[self.suite]
        cfg = SuiteConfig(**asdict(self))
        for name, value in spec.defaults.items():
            if getattr(cfg, name) is None:
                setattr(cfg, name, value)
        if cfg.trials < 1:
            raise ValueError("trials must be at least 1")
        if cfg.tol <= 0:
            raise ValueError("tolerance must be positive")
        if not 1 <= cfg.dim <= 4:
            raise ValueError("dimension must be between 1 and 4")
        degrees = [d for d in (cfg.p, cfg.q, cfg.r) if d is not None]
        if any(d < 0 for d in degrees) or sum(degrees) > 6:
            raise ValueError("degrees must be non-negative with p + q + r <= 6")
        if cfg.bound <= 0 or cfg.poly_degree < 0:
            raise ValueError("bound must be positive and polynomial degree non-negative")
        return cfg


@dataclass
class SuiteReport:
    suite: str
    trials: int
    max_residual: Optional[float]
    tolerance: float
    passed: bool
    constants: Dict[str, Optional[float]] = field(default_factory=dict)
    components: Dict[str, Optional[float]] = field(default_factory=dict)
    params: Dict[str, object] = field(default_factory=dict)
    error: Optional[str] = None
    seconds: float = 0.0

    def to_json(self) -> dict:
        """Schema fields plus parameters; wall time is left out so reports are reproducible."""
        out = {
            "suite": self.suite,
            "trials": self.trials,
            "max_residual": _sig(self.max_residual),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "constants": {k: _sig(v) for k, v in self.constants.items()},
        }
        if self.components:
            out["components"] = {k: _sig(v) for k, v in self.components.items()}
        out["params"] = self.params
        if self.error:
            out["error"] = self.error
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        res = "n/a" if self.max_residual is None else f"{self.max_residual:.3g}"
        text = f"{self.suite:<20} {status}  max_residual={res}  tol={self.tolerance:.3g}  trials={self.trials}  time={self.seconds:.2f}s"
        if self.constants:
            text += "  " + " ".join(f"{k}={_fmt(v)}" for k, v in self.constants.items())
        if self.error:
            text += f"  error: {self.error}"
        return text


def _sig(x):
    if x is None or not math.isfinite(x):
        return None
    return float(f"{x:.3g}")


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.3g}"


@dataclass
class Suite:
    name: str
    run: Callable[[SuiteConfig], "Outcome"]
    defaults: Dict[str, object]
    description: str


@dataclass
class Outcome:
    residual: float
    constants: Dict[str, Optional[float]] = field(default_factory=dict)
    components: Dict[str, Optional[float]] = field(default_factory=dict)
    # extra thresholds: component name -> tolerance it must meet
    limits: Dict[str, float] = field(default_factory=dict)
    ok: bool = True


def _trial_rngs(cfg: SuiteConfig):
    for t in range(cfg.trials):
        yield np.random.default_rng(cfg.seed ^ t)


def _maxabs(a) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def _tangent_gap(a, b) -> float:
    return max(_maxabs(a.base - b.base), _maxabs(a.direction - b.direction))


def _natural_gap(source: SemiForm, target: SemiForm, f: PolyMap, gamma: Microcube, push: bool = True) -> float:
    """max gap between f(E_d(gamma)) and E'_d(f o gamma)."""
    cube = gamma.to_weil()
    (d,) = fresh_tags(1, cube.used_tags)
    lhs = f(source(d, cube)).split(d)
    rhs = target(d, cube.push(f) if push else cube).split(d)
    return max(_maxabs(lhs[0].to_real() - rhs[0].to_real()), _maxabs(lhs[1].to_real() - rhs[1].to_real()))


# ----------------------------------------------------------------------------
# suite bodies


def _map_strong_diff(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    for rng in _trial_rngs(cfg):
        g1 = gen_microcube(rng, 2, cfg.dim, cfg.bound)
        c2 = g1.coeffs.copy()
        c2[3] = rng.uniform(-cfg.bound, cfg.bound, cfg.dim)
        g2 = Microcube(c2)
        f = PolyMap([gen_poly(rng, cfg.dim, 3, cfg.bound) for _ in range(cfg.dim)])
        lhs = strong_diff(map_push(f, g1), map_push(f, g2))
        t = strong_diff(g1, g2)
        # the planted bug forgets the chain rule and reports the unmapped direction
        rhs = map_push(f, t.as_microcube()) if not cfg.mutate else Microcube(np.vstack([f(t.base), t.direction]))
        worst = max(worst, _maxabs(lhs.base - rhs.base), _maxabs(lhs.direction - rhs.coeffs[1]))
    return Outcome(worst)


def _general_jacobi(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    for rng in _trial_rngs(cfg):
        t1, t2, t3 = jacobi_terms(gen_sextuple(rng, cfg.dim, cfg.bound))
        total = t1 + t2 - t3 if cfg.mutate else t1 + t2 + t3
        worst = max(worst, _maxabs(total))
    return Outcome(worst)


class _QuadraticProbe(SemiForm):
    """Deliberately non-homogeneous: direction a_1 * a_1 componentwise."""

    def __init__(self, dim: int):
        self.degree, self.dim = 1, dim

    def __call__(self, d: int, cube) -> WeilVector:
        self._check(d, cube)
        e = cube.edge(0)
        return cube.base() + WeilVector([c * c for c in e.comps]).times_tag(d)


def _form_contracts(cfg: SuiteConfig) -> Outcome:
    base = hom = alt = 0.0
    neg_hom = neg_alt = math.inf
    for rng in _trial_rngs(cfg):
        K = gen_form(rng, cfg.dim, cfg.p, cfg.poly_degree, cfg.bound)
        gamma = [gen_microcube(rng, cfg.p, cfg.dim, cfg.bound)]
        base = max(base, check_base(K, cubes=gamma))
        hom = max(hom, check_homogeneity(K, cubes=gamma))
        alt = max(alt, check_alternating(K, cubes=gamma, permute=not cfg.mutate))
    # negative controls: each must register far above tolerance
    rng = np.random.default_rng(cfg.seed)
    probe_cubes = [gen_microcube(rng, 1, cfg.dim, cfg.bound) for _ in range(3)]
    neg_hom = check_homogeneity(_QuadraticProbe(cfg.dim), cubes=probe_cubes)
    if cfg.dim >= 2:
        K = gen_form(rng, cfg.dim, 1, 1, cfg.bound)
        L = gen_form(rng, cfg.dim, 2, 1, cfg.bound)
        cubes = [gen_microcube(rng, 2, cfg.dim, cfg.bound) for _ in range(3)]
        neg_alt = check_alternating(InteriorHat(K, L), cubes=cubes)
    residual = max(base, hom, alt)
    controls_fire = neg_hom > 1e3 * cfg.tol and neg_alt > 1e3 * cfg.tol
    return Outcome(
        residual,
        components={"base": base, "homogeneity": hom, "alternating": alt, "control_homogeneity": neg_hom, "control_alternating": neg_alt if math.isfinite(neg_alt) else None},
        ok=controls_fire,
    )


def _perm_strong_diff(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    n = cfg.p + cfg.q
    perms = list(Permutation.all(n))
    for rng in _trial_rngs(cfg):
        K = gen_form(rng, cfg.dim, cfg.p, cfg.poly_degree, cfg.bound)
        L = gen_form(rng, cfg.dim, cfg.q, cfg.poly_degree, cfg.bound)
        gamma = gen_microcube(rng, n, cfg.dim, cfg.bound)
        sigma = perms[int(rng.integers(len(perms)))]
        moved = gamma.permute(sigma)
        # strong difference of the sigma-acted squares, computed on real tables
        acted = strong_diff(pair_square(K, L, moved), twisted_pair_square(K, L, moved))
        # sigma-action of the strong difference, computed by the Weil engine;
        # the planted bug skips the permutation
        E = FloorBracket(K, L) if cfg.mutate else Permuted(FloorBracket(K, L), sigma)
        worst = max(worst, _tangent_gap(acted, E.tangent(gamma)))
    return Outcome(worst)


def _interior(cfg: SuiteConfig) -> Outcome:
    hat_base = hat_hom = alt = ident = 0.0
    for rng in _trial_rngs(cfg):
        K = gen_form(rng, cfg.dim, cfg.p, cfg.poly_degree, cfg.bound)
        L = gen_form(rng, cfg.dim, cfg.q, cfg.poly_degree, cfg.bound)
        n = cfg.p + cfg.q - 1
        cubes = [gen_microcube(rng, n, cfg.dim, cfg.bound)]
        hat = InteriorHat(K, L)
        hat_base = max(hat_base, check_base(hat, cubes=cubes))
        hat_hom = max(hat_hom, check_homogeneity(hat, cubes=cubes))
        iKL = Alternation(hat, (cfg.p, cfg.q - 1), signed=not cfg.mutate)
        alt = max(alt, check_alternating(iKL, cubes=cubes))
        # inserting the identity 1-form multiplies an l-form by l
        Id = VectorForm(FormKernel.identity(cfg.dim))
        g = gen_microcube(rng, cfg.q, cfg.dim, cfg.bound)
        got = Alternation(InteriorHat(Id, L), (1, cfg.q - 1), signed=not cfg.mutate).tangent(g)
        ref = L.tangent(g)
        ident = max(ident, _maxabs(got.direction - cfg.q * ref.direction))
    return Outcome(
        max(hat_base, hat_hom, alt, ident),
        components={"hat_base": hat_base, "hat_homogeneity": hat_hom, "alternating": alt, "identity_insertion": ident},
    )


def _pulled_pair(rng, cfg: SuiteConfig, f, f_inv, degrees):
    targets = [gen_form(rng, cfg.dim, k, cfg.poly_degree, cfg.bound) for k in degrees]
    sources = [PulledBack(f, f_inv, T) for T in targets]
    return sources, targets


def _interior_naturality(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    for rng in _trial_rngs(cfg):
        f, f_inv = gen_diffeo(rng, cfg.dim, 2, 0.5)
        (K, L), (K2, L2) = _pulled_pair(rng, cfg, f, f_inv, (cfg.p, cfg.q))
        gamma = gen_microcube(rng, cfg.p + cfg.q - 1, cfg.dim, cfg.bound)
        worst = max(worst, _natural_gap(interior(K, L), interior(K2, L2), f, gamma, push=not cfg.mutate))
    return Outcome(worst)


def _scale_axis_only(gamma: Microcube, alpha: float, i: int) -> Microcube:
    """Planted bug: scales only a_i, leaving the higher coefficients through slot i alone."""
    c = gamma.coeffs.copy()
    c[1 << (i - 1)] *= alpha
    return Microcube(c)


def _floor_homogeneity(cfg: SuiteConfig) -> Outcome:
    base = hom = 0.0
    for rng in _trial_rngs(cfg):
        K = gen_form(rng, cfg.dim, cfg.p, cfg.poly_degree, cfg.bound)
        L = gen_form(rng, cfg.dim, cfg.q, cfg.poly_degree, cfg.bound)
        E = FloorBracket(K, L)
        gamma = gen_microcube(rng, cfg.p + cfg.q, cfg.dim, cfg.bound)
        base = max(base, check_base(E, cubes=[gamma]))
        if cfg.mutate:
            ref = E.tangent(gamma)
            for i in range(1, E.degree + 1):
                for alpha in (2.0, -0.5, 3.0):
                    got = E.tangent(_scale_axis_only(gamma, alpha, i))
                    hom = max(hom, _maxabs(got.direction - alpha * ref.direction))
        else:
            hom = max(hom, check_homogeneity(E, cubes=[gamma]))
    return Outcome(max(base, hom), components={"base": base, "homogeneity": hom})


def _assoc_alternation(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    p, q, r = cfg.p, cfg.q, cfg.r
    for rng in _trial_rngs(cfg):
        K1, K2, K3 = (gen_form(rng, cfg.dim, k, cfg.poly_degree, cfg.bound) for k in (p, q, r))
        gamma = gen_microcube(rng, p + q + r, cfg.dim, cfg.bound)
        inner = Alternation(FloorBracket(K2, K3), (q, r), signed=not cfg.mutate)
        lhs = Alternation(FloorBracket(K1, inner), (p, q + r)).tangent(gamma)
        rhs = Alternation(FloorBracket(K1, FloorBracket(K2, K3)), (p, q, r)).tangent(gamma)
        worst = max(worst, _tangent_gap(lhs, rhs))
    return Outcome(worst)


def _antisymmetry(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    p, q = cfg.p, cfg.q
    eps = (-1) ** (p * q + (1 if cfg.mutate else 0))
    for rng in _trial_rngs(cfg):
        K = gen_form(rng, cfg.dim, p, cfg.poly_degree, cfg.bound)
        L = gen_form(rng, cfg.dim, q, cfg.poly_degree, cfg.bound)
        gamma = gen_microcube(rng, p + q, cfg.dim, cfg.bound)
        a = fn_bracket(K, L).tangent(gamma).direction
        b = fn_bracket(L, K).tangent(gamma).direction
        worst = max(worst, _maxabs(a + eps * b))
    return Outcome(worst)


def _graded_jacobi(cfg: SuiteConfig) -> Outcome:
    keys = ("jacobi", "phi_identity_1", "phi_identity_2", "phi_identity_3", "assoc", "phi_general_jacobi")
    comps = dict.fromkeys(keys, 0.0)
    for rng in _trial_rngs(cfg):
        Ks = [gen_form(rng, cfg.dim, k, cfg.poly_degree, cfg.bound) for k in (cfg.p, cfg.q, cfg.r)]
        gamma = gen_microcube(rng, cfg.p + cfg.q + cfg.r, cfg.dim, cfg.bound)
        got = graded_jacobi_residual(*Ks, [gamma], flip=cfg.mutate)
        for k in keys:
            comps[k] = max(comps[k], got[k])
    return Outcome(max(comps.values()), components=comps)


def _fn_naturality(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    for rng in _trial_rngs(cfg):
        f, f_inv = gen_diffeo(rng, cfg.dim, 2, 0.5)
        (K, L), (K2, L2) = _pulled_pair(rng, cfg, f, f_inv, (cfg.p, cfg.q))
        gamma = gen_microcube(rng, cfg.p + cfg.q, cfg.dim, cfg.bound)
        worst = max(worst, _natural_gap(fn_bracket(K, L), fn_bracket(K2, L2), f, gamma, push=not cfg.mutate))
    return Outcome(worst)


def _lie_decomposition(cfg: SuiteConfig) -> Outcome:
    alt = floor = 0.0
    flat_seen = curved_seen = False
    for t, rng in enumerate(_trial_rngs(cfg)):
        K = gen_form(rng, cfg.dim, cfg.p, cfg.poly_degree, cfg.bound)
        L = gen_form(rng, cfg.dim, cfg.q, cfg.poly_degree, cfg.bound)
        nabla = Connection.flat(cfg.dim) if t % 2 == 0 else gen_connection(rng, cfg.dim, True, 1, cfg.bound)
        flat_seen |= t % 2 == 0
        curved_seen |= t % 2 == 1
        gamma = gen_microcube(rng, cfg.p + cfg.q, cfg.dim, cfg.bound)
        if cfg.mutate:
            # planted sign bug: L_K L + (-1)^{kl} L_L K
            s = (-1) ** (cfg.p * cfg.q)
            a = fn_bracket(K, L).tangent(gamma).direction
            b = lie(K, L, nabla).tangent(gamma).direction + s * lie(L, K, nabla).tangent(gamma).direction
            alt = max(alt, _maxabs(a - b))
        else:
            a, fl = lie_decomposition_residual(K, L, nabla, [gamma])
            alt, floor = max(alt, a), max(floor, fl)
    return Outcome(max(alt, floor), components={"alternated": alt, "floor": floor})


def _lie_naturality(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    for rng in _trial_rngs(cfg):
        f, f_inv = gen_diffeo(rng, cfg.dim, 2, 0.5)
        (K, L), (K2, L2) = _pulled_pair(rng, cfg, f, f_inv, (cfg.p, cfg.q))
        target_nabla = Connection.flat(cfg.dim)
        # the planted bug keeps the flat connection on the source instead of pulling it back
        nabla = Connection.flat(cfg.dim) if cfg.mutate else target_nabla.pullback(f, f_inv)
        gamma = gen_microcube(rng, cfg.p + cfg.q, cfg.dim, cfg.bound)
        worst = max(worst, _natural_gap(lie(K, L, nabla), lie(K2, L2, target_nabla), f, gamma))
    return Outcome(worst)


def _oracle_lie(cfg: SuiteConfig) -> Outcome:
    worst = 0.0
    for rng in _trial_rngs(cfg):
        X = gen_form(rng, cfg.dim, 0, cfg.poly_degree, cfg.bound)
        Y = gen_form(rng, cfg.dim, 0, cfg.poly_degree, cfg.bound)
        x = rng.uniform(-cfg.bound, cfg.bound, cfg.dim)
        fx = [t.coeff for t in sorted(X.kernel.terms, key=lambda t: t.output)]
        fy = [t.coeff for t in sorted(Y.kernel.terms, key=lambda t: t.output)]
        ref = oracle.lie_bracket_classical(fy, fx) if cfg.mutate else oracle.lie_bracket_classical(fx, fy)
        got = fn_bracket(X, Y).tangent(Microcube.point(x))
        worst = max(worst, _maxabs(got.direction - np.array([c(x) for c in ref])), _maxabs(got.base - x))
    return Outcome(worst)


def _oracle_consistency(kernels, flip: bool) -> Dict[str, float]:
    """Graded antisymmetry and Jacobi of the classical bracket on kernels."""
    K1, K2, K3 = kernels
    p, q = K1.degree, K2.degree
    br = lambda A, B: oracle.kernel_bracket(A, B, flip)  # noqa: E731
    anti = oracle.kernel_gap(br(K1, K2), oracle.scale_kernel(br(K2, K1), -((-1) ** (p * q))))
    lhs = br(K1, br(K2, K3))
    rhs = oracle.add_kernels(br(br(K1, K2), K3), oracle.scale_kernel(br(K2, br(K1, K3)), (-1) ** (p * q)))
    return {"oracle_antisymmetry": anti, "oracle_jacobi": oracle.kernel_gap(lhs, rhs)}


def _oracle_fn(cfg: SuiteConfig) -> Outcome:
    p, q = cfg.p, cfg.q
    ratios, fit = [], 0.0
    zero_case = p + q > cfg.dim
    for rng in _trial_rngs(cfg):
        K = gen_form(rng, cfg.dim, p, cfg.poly_degree, cfg.bound)
        L = gen_form(rng, cfg.dim, q, cfg.poly_degree, cfg.bound)
        gamma = gen_microcube(rng, p + q, cfg.dim, cfg.bound)
        e = fn_bracket(K, L).tangent(gamma).direction
        vecs = [gamma.coeff((s + 1,)) for s in range(p + q)]
        o = oracle.evaluate_kernel(oracle.kernel_bracket(K.kernel, L.kernel, cfg.mutate), gamma.base, vecs)
        scale = 1.0 + _maxabs(o)
        if zero_case or float(o @ o) < 1e-20:
            fit = max(fit, _maxabs(e - o) / scale)
            continue
        c = float(e @ o) / float(o @ o)
        ratios.append(c)
        fit = max(fit, _maxabs(e - c * o) / scale)
    if ratios:
        mean = float(np.mean(ratios))
        spread = (max(ratios) - min(ratios)) / abs(mean)
    else:
        mean, spread = None, 0.0
    # oracle self-consistency on a few low-degree triples
    cons = {"oracle_antisymmetry": 0.0, "oracle_jacobi": 0.0}
    rng = np.random.default_rng(cfg.seed)
    for _ in range(min(cfg.trials, 5)):
        kernels = [gen_form(rng, cfg.dim, k, 1, cfg.bound).kernel for k in (p, q, p)]
        for k, v in _oracle_consistency(kernels, cfg.mutate).items():
            cons[k] = max(cons[k], v)
    residual = max(spread, fit)
    return Outcome(
        residual,
        constants={f"c_{p}_{q}": mean},
        components={"relative_spread": spread, "relative_fit": fit, **cons},
        limits={"oracle_antisymmetry": 1e-9, "oracle_jacobi": 1e-9},
    )


SUITES: Dict[str, Suite] = {}


def _register(name, run, description, **defaults):
    base = {"dim": 2, "trials": 20, "tol": 1e-9, "p": None, "q": None, "r": None}
    base.update(defaults)
    SUITES[name] = Suite(name, run, base, description)


_register("map-strong-diff", _map_strong_diff, "maps commute with strong differences", trials=500)
_register("general-jacobi", _general_jacobi, "general Jacobi identity on admissible sextuples", dim=3, trials=1000)
_register("form-contracts", _form_contracts, "base, homogeneity and alternation of kernel forms", dim=3, p=2, trials=500, tol=1e-10)
_register("perm-strong-diff", _perm_strong_diff, "permutation action commutes with strong difference", p=1, q=1, trials=50)
_register("interior", _interior, "interior derivation: semiform contract, alternation, identity insertion", dim=3, p=1, q=2, trials=20)
_register("interior-naturality", _interior_naturality, "interior derivation of f-related forms", p=1, q=1, trials=20, tol=1e-8)
_register("floor-homogeneity", _floor_homogeneity, "floor bracket preserves base and is slotwise homogeneous", p=1, q=1, trials=20)
_register("assoc-alternation", _assoc_alternation, "nested alternations collapse to A_{p,q,r}", dim=3, p=1, q=1, r=1, trials=10)
_register("antisymmetry", _antisymmetry, "graded antisymmetry of the FN bracket", p=1, q=1, trials=50, tol=1e-8)
_register("graded-jacobi", _graded_jacobi, "graded Jacobi identity and its proof steps", dim=3, p=1, q=1, r=1, trials=10, tol=1e-7)
_register("fn-naturality", _fn_naturality, "FN bracket of f-related forms", p=1, q=1, trials=20, tol=1e-8)
_register("lie-decomposition", _lie_decomposition, "FN bracket from Lie derivations, symmetric connection", p=1, q=1, trials=20)
_register("lie-naturality", _lie_naturality, "Lie derivation of f-related forms and connections", p=1, q=1, trials=20, tol=1e-8)
_register("oracle-lie", _oracle_lie, "degree-0 FN bracket equals the classical Lie bracket", trials=200, tol=1e-10)
_register("oracle-fn", _oracle_fn, "FN bracket proportional to the classical formula", dim=3, p=1, q=1, trials=100, tol=1e-6)


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    cfg = cfg.resolved()
    params = {k: v for k, v in asdict(cfg).items() if k not in ("suite", "trials", "tol") and v is not None}
    start = time.perf_counter()
    try:
        out = SUITES[cfg.suite].run(cfg)
    except (ConsistencyError, AgreementError, FNCalcError) as exc:
        return SuiteReport(cfg.suite, cfg.trials, None, cfg.tol, False, params=params, error=f"{type(exc).__name__}: {exc}", seconds=time.perf_counter() - start)
    passed = out.ok and out.residual <= cfg.tol
    passed = passed and all((out.components.get(k) or 0.0) <= lim for k, lim in out.limits.items())
    return SuiteReport(
        cfg.suite,
        cfg.trials,
        out.residual,
        cfg.tol,
        bool(passed),
        constants=out.constants,
        components=out.components,
        params=params,
        seconds=time.perf_counter() - start,
    )


def suite_names() -> List[str]:
    return list(SUITES)
