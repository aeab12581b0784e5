"""Named check suites.

A check is data: an id, the suite it belongs to, the claim it verifies, the
catalog model it runs on, an evaluator and the expected value. Evaluators
return either a residual (expected ``ZERO`` or ``NONZERO``) or an observed
value compared with the expected one.
"""
import logging
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, partial
from itertools import combinations, product
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from app.config import settings
from app.core import catalog
from app.core import linalg as la
from app.core.catalog import ModelBundle
from app.core.errors import MalformedInputError, UnknownSuiteError
from app.core.exterior import (
    AltForm,
    CurvOperator,
    derivation_action,
    endo_form,
    form_endo,
    interior,
    lower,
    torsion_endo,
    torsion_map,
    wedge,
    wedge_endo,
)
from app.core.liealg import (
    bracket,
    casimir_so,
    commutant,
    curvature_space_dim,
    so_algebra,
    span_close,
    stabilizer,
)
from app.core.reductive import (
    canonical,
    canonical_torsion,
    connection_report,
    covariant_derivative,
    exterior_derivative_invariant,
    fit_kappa,
    levi_civita,
    parallel_residual,
    riemann_from_tau,
    transvection,
)
from app.core.splitting import (
    canonical_splitting,
    decomposability_search,
    horizontal_vertical_residual,
    s3_refinement_residual,
    s4_residual,
    special_type_check,
    submersion_identity_check,
)
from app.services.citations import CITATIONS, Citation, cite

logger = logging.getLogger(__name__)

SUITES = ("core", "cs-classification", "gray", "ng2", "sasaki", "threead", "dim3", "splitting", "properties")
ZERO = "zero"
NONZERO = "nonzero"
PASS, FAIL, SKIP = "pass", "fail", "skip"

Key = Tuple[str, Tuple[Tuple[str, object], ...]]


def model_key(name: str, **params) -> Key:
    return name, tuple(sorted(params.items()))


def _key_label(key: Key) -> str:
    name, params = key
    if not params:
        return name
    return name + "(" + ", ".join(f"{k}={v}" for k, v in params) + ")"


def _slug(label: str) -> str:
    """Check-id form of a model label: kxk(t=1/2) becomes kxk-t-1-2."""
    out = label
    for ch in "(=/, ":
        out = out.replace(ch, "-")
    return "-".join(part for part in out.replace(")", "").split("-") if part)


# bundles and derived reports are deterministic, so they are shared between runs


@lru_cache(maxsize=None)
def _exact_bundle(key: Key) -> ModelBundle:
    return catalog.build(key[0], dict(key[1]))


@lru_cache(maxsize=None)
def _float_bundle(key: Key) -> ModelBundle:
    return _exact_bundle(key).as_float()


def _bundle(key: Key, exact_mode: bool) -> ModelBundle:
    return _exact_bundle(key) if exact_mode else _float_bundle(key)


@lru_cache(maxsize=None)
def _torsion_report(key: Key, exact_mode: bool):
    b = _bundle(key, exact_mode)
    return connection_report(b.model, b.lam_tau)


@lru_cache(maxsize=None)
def _riemann(key: Key, exact_mode: bool):
    b = _bundle(key, exact_mode)
    return riemann_from_tau(b.model, b.tau, b.lam_tau)


@lru_cache(maxsize=None)
def _levi_civita_curvature(key: Key, exact_mode: bool) -> CurvOperator:
    b = _bundle(key, exact_mode)
    return connection_report(b.model, levi_civita(b.model), with_holonomy=False).curvature_operator


class CheckContext:
    """Scalar mode, tolerance and a per-check random generator derived from the seed."""

    def __init__(self, mode: str, seed: int, tol: float, check_id: str = ""):
        self.mode = mode
        self.exact_mode = mode == "exact"
        self.seed = seed
        self.tol = tol
        self.rng = np.random.default_rng([seed, zlib.crc32(check_id.encode())])

    def bundle(self, key: Key) -> ModelBundle:
        return _bundle(key, self.exact_mode)

    def torsion_report(self, key: Key):
        return _torsion_report(key, self.exact_mode)

    def riemann(self, key: Key):
        return _riemann(key, self.exact_mode)

    def convert(self, value):
        return value if self.exact_mode else catalog.to_float(value)

    def scalar(self, q):
        return Fraction(q) if self.exact_mode else float(q)

    def zero(self):
        return self.scalar(0)

    def eye(self, n: int) -> np.ndarray:
        return la.eye(n, self.exact_mode)

    def vanishes(self, x) -> bool:
        return la.vanishes(x, None if self.exact_mode else self.tol)


@dataclass(frozen=True)
class Check:
    id: str
    suite: str
    ref: str
    model: Optional[str]
    evaluate: Callable[[CheckContext], object]
    expected: object = ZERO
    modes: Tuple[str, ...] = ("exact", "float")


@dataclass
class CheckResult:
    id: str
    suite: str
    status: str
    residual: object
    tol: Optional[float]
    anchor: Citation
    model: Optional[str] = None
    expected: Optional[str] = None
    observed: Optional[str] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass
class SuiteReport:
    suite: str
    seed: int
    mode: str
    tol: Optional[float]
    version: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.checks if c.status == PASS)

    @property
    def failed(self) -> int:
        return sum(1 for c in self.checks if c.status == FAIL)

    @property
    def skipped(self) -> int:
        return sum(1 for c in self.checks if c.status == SKIP)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def _display(value) -> str:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _judge(check: Check, ctx: CheckContext, observed) -> Tuple[bool, object]:
    """(passed, residual) for an observed value against the check's expectation."""
    expected = check.expected
    if isinstance(expected, str) and expected == ZERO:
        return ctx.vanishes(observed), observed
    if isinstance(expected, str) and expected == NONZERO:
        return not ctx.vanishes(observed), observed
    numeric = isinstance(observed, (Fraction, float, np.floating)) and not isinstance(expected, (bool, tuple, str))
    if not numeric:
        ok = observed == expected
        return ok, ctx.zero() if ok else ctx.scalar(1)
    residual = abs(observed - ctx.scalar(expected))
    return ctx.vanishes(residual), residual


def run_check(check: Check, mode: str, seed: int, tol: float) -> CheckResult:
    ctx = CheckContext(mode, seed, tol, check.id)
    result = CheckResult(
        id=check.id, suite=check.suite, status=SKIP, residual=None,
        tol=None if ctx.exact_mode else tol, anchor=cite(check.ref), model=check.model,
        expected=None if check.expected == ZERO else _display(check.expected),
    )
    if mode not in check.modes:
        result.detail = f"not registered for {mode} mode"
        return result
    try:
        observed = check.evaluate(ctx)
        passed, residual = _judge(check, ctx, observed)
    except Exception as exc:  # a single broken check never aborts the suite
        logger.info("check %s raised %s: %s", check.id, type(exc).__name__, exc)
        result.status = FAIL
        result.detail = f"{type(exc).__name__}: {exc}"
        return result
    result.status = PASS if passed else FAIL
    result.residual = residual
    result.observed = _display(observed)
    if not passed:
        logger.info("check %s failed: observed %s, expected %s", check.id, result.observed, result.expected or 0)
    return result


# core


def _stabilizer_dim(key: Key, ctx: CheckContext) -> int:
    b = ctx.bundle(key)
    return stabilizer(b.tau, b.gram).dimension


def _casimir(n: int, ctx: CheckContext):
    cas = ctx.convert(casimir_so(n))
    return la.max_abs(cas - ctx.scalar(n - 1) * ctx.eye(n))


@lru_cache(maxsize=None)
def _curvature_space_dim(builder_name: str, exact_mode: bool) -> int:
    builders = {
        "so3-standard": lambda: so_algebra(3),
        "su3-adjoint": catalog.su3_adjoint,
        "so3-harmonic-cubics": catalog.so3_harmonic_cubics,
    }
    h = builders[builder_name]()
    return curvature_space_dim(h if exact_mode else h.as_float())[0]


def _curvature_space(builder_name: str, ctx: CheckContext) -> int:
    return _curvature_space_dim(builder_name, ctx.exact_mode)


def _g2_endos(ctx: CheckContext):
    phi = ctx.convert(catalog.build_g2_form())
    one = ctx.eye(7)
    return phi, one, [torsion_endo(phi, one[i]) for i in range(7)]


def _g2_bracket_identity(ctx: CheckContext):
    """max over the 49 basis pairs of |2φ_{φ_X Y} + [φ_X, φ_Y] − 3 X∧Y|."""
    phi, one, endos = _g2_endos(ctx)
    t = torsion_map(phi)
    worst = ctx.zero()
    for i, j in product(range(7), repeat=2):
        lhs = bracket(endos[i], endos[j])
        for k in range(7):
            if t[i, j, k] != 0:
                lhs = lhs + 2 * t[i, j, k] * endos[k]
        worst = max(worst, la.max_abs(lhs - 3 * wedge_endo(one[i], one[j])))
    return worst


def _g2_anticommutator_identity(ctx: CheckContext):
    """max over the 49 basis pairs of |{φ_X, φ_Y} + 2⟨X,Y⟩ Id − X⊙Y|."""
    _, one, endos = _g2_endos(ctx)
    worst = ctx.zero()
    for i, j in product(range(7), repeat=2):
        lhs = np.dot(endos[i], endos[j]) + np.dot(endos[j], endos[i])
        sym = np.outer(one[j], one[i]) + np.outer(one[i], one[j])
        worst = max(worst, la.max_abs(lhs + 2 * one[i, j] * one - sym))
    return worst


# (K x K)/K and the canonical connections


def _kxk_tables(t, ctx: CheckContext):
    key = model_key("kxk", t=Fraction(t))
    b = ctx.bundle(key)
    return b, connection_report(b.model, canonical(b.model))


def _kxk_torsion(t, ctx: CheckContext):
    """max |T(X_i, X_j) + 2t [X_i, X_j]|."""
    b, report = _kxk_tables(t, ctx)
    return la.max_abs(report.torsion + ctx.scalar(2 * Fraction(t)) * b.tensors["structure"])


def _kxk_curvature(t, ctx: CheckContext):
    """max |R(X_i, X_j) + (1 − t²) ad([X_i, X_j])|."""
    b, report = _kxk_tables(t, ctx)
    c = b.tensors["structure"]
    ads = [c[k].T for k in range(3)]  # ad(X_k)[:, j] = [X_k, X_j]
    factor = ctx.scalar(1 - Fraction(t) ** 2)
    worst = ctx.zero()
    for i, j in combinations(range(3), 2):
        expected = sum((c[i, j, k] * ads[k] for k in range(3)), la.zeros((3, 3), ctx.exact_mode))
        worst = max(worst, la.max_abs(report.curvature[i, j] + factor * expected))
    return worst


def _kxk_holonomy(t, ctx: CheckContext) -> int:
    return _kxk_tables(t, ctx)[1].holonomy.dimension


def _kxk_kappa(t, ctx: CheckContext):
    b = ctx.bundle(model_key("kxk", t=Fraction(t)))
    fit = fit_kappa(b.model, b.lam_tau, b.tau)
    if not ctx.vanishes(fit.residual) or fit.scal_residual is None or not ctx.vanishes(fit.scal_residual):
        raise ValueError(f"κ fit is not exact (residual {fit.residual}, scal {fit.scal_residual})")
    return fit.kappa


def _canonical_holonomy_dim(key: Key, ctx: CheckContext) -> int:
    b = ctx.bundle(key)
    return connection_report(b.model, canonical(b.model)).holonomy.dimension


def _holonomy_is_isotropy_bracket(key: Key, ctx: CheckContext):
    """Defect between hol(∇^can) and ρ([m, m]_h): dimension gap plus elements outside."""
    b = ctx.bundle(key)
    hol = connection_report(b.model, canonical(b.model)).holonomy
    image = b.model.mm_h_image()
    outside = sum(1 for a in image if not hol.contains(a))
    return ctx.scalar(abs(hol.dimension - len(image)) + outside)


def _levi_civita_is_canonical(key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return max(la.max_abs(m) for m in levi_civita(b.model).maps)


def _is_symmetric(key: Key, ctx: CheckContext) -> bool:
    return ctx.bundle(key).model.is_symmetric


def _isotropy_symmetric_commutant(key: Key, ctx: CheckContext) -> int:
    return len(commutant(ctx.bundle(key).model.isotropy()).symmetric)


def _isotropy_curvature_space(key: Key, ctx: CheckContext) -> int:
    return curvature_space_dim(ctx.bundle(key).model.isotropy())[0]


def _transvection_profile(key: Key, ctx: CheckContext):
    """(dimension, Jacobi residual vanishes, Killing verdict, sorted simple ideal dimensions)."""
    b = ctx.bundle(key)
    tr = transvection(b.model, canonical(b.model))
    ideals = tr.algebra.ideals(ctx.seed)
    simple = all(tr.algebra.subalgebra(ideal).is_simple(ctx.seed) for ideal in ideals)
    return (tr.dimension, ctx.vanishes(tr.jacobi_residual()), tr.killing().verdict,
            tuple(sorted(i.shape[1] for i in ideals)), simple)


# Gray manifolds


def _gray_holomorphic(which: int, key: Key, ctx: CheckContext):
    return catalog.gray_holomorphic_residuals(ctx.bundle(key))[which]


def _gray_norm(key: Key, ctx: CheckContext):
    return catalog.gray_norm_constant(ctx.bundle(key))


def _gray_twistor(key: Key, ctx: CheckContext):
    return catalog.gray_twistor_constant(ctx.bundle(key))


def _torsion_holonomy_dim(key: Key, ctx: CheckContext) -> int:
    return ctx.torsion_report(key).holonomy.dimension


def _kappa_fit_residual(key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return fit_kappa(b.model, b.lam_tau, b.tau).residual


# nearly parallel G2 and 3-(α, δ)-Sasaki


def _torsion_minus_phi(key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return (b.tau - b.tensors["phi"] * b.params["alpha"]).max_abs()


def _parallel_torsion(key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return parallel_residual(b.model, b.lam_tau, b.tau)


@lru_cache(maxsize=None)
def _splitting_algebra(key: Key, source: str, exact_mode: bool):
    """The algebra g of a splitting: the holonomy of ∇^τ, stab(τ) or one stored with the model."""
    b = _bundle(key, exact_mode)
    if source == "stab":
        return b, stabilizer(b.tau, b.gram)
    if source == "given":
        return b, b.tensors["g"]
    return b, _torsion_report(key, exact_mode).holonomy


@lru_cache(maxsize=None)
def _submersion_report(key: Key, source: str, exact_mode: bool, seed: int):
    b, g = _splitting_algebra(key, source, exact_mode)
    report = _torsion_report(key, exact_mode)
    s = canonical_splitting(g, b.tau, seed, hol=report.holonomy)
    return submersion_identity_check(b.model, report, s, b.tau, g)


def _vertical_constant(key: Key, ctx: CheckContext):
    fit = _submersion_report(key, "hol", ctx.exact_mode, ctx.seed).vertical
    if fit.constant is None or not ctx.vanishes(fit.residual):
        raise ValueError(f"vertical curvature is not a multiple of τ_{{τ_U V}} (residual {fit.residual})")
    return fit.constant


def _einstein_defect(ricci: np.ndarray, constant, ctx: CheckContext):
    n = ricci.shape[0]
    return la.max_abs(ricci - ctx.scalar(constant) * ctx.eye(n))


def _ricci_torsion(key: Key, ctx: CheckContext):
    """max |Ric^τ − 48α² Id| with τ₀ = 12α."""
    alpha = ctx.bundle(key).params["alpha"]
    return _einstein_defect(ctx.torsion_report(key).curvature_operator.ricci(), 48 * alpha * alpha, ctx)


def _ricci_levi_civita(key: Key, ctx: CheckContext):
    """max |Ric^g − (3τ₀²/8) Id| with τ₀ = 12α."""
    alpha = ctx.bundle(key).params["alpha"]
    tau0 = 12 * alpha
    return _einstein_defect(ctx.riemann(key).ricci, Fraction(3, 8) * tau0 * tau0, ctx)


def _holonomy_in_vertical_block(key: Key, ctx: CheckContext):
    """Number of holonomy elements outside stab(τ) or not preserving V."""
    b = ctx.bundle(key)
    hol = ctx.torsion_report(key).holonomy
    stab = stabilizer(b.tau, b.gram)
    p_v = b.tensors["p_v"]
    bad = sum(1 for a in hol.basis if not stab.contains(a) or not la.is_zero(bracket(a, p_v)))
    return ctx.scalar(bad)


def _auxiliary_flat_on_vertical(key: Key, ctx: CheckContext):
    """max |R'(X, Y) P_V| for the auxiliary connection ∇^τ − 6τ^V."""
    b = ctx.bundle(key)
    report = connection_report(b.model, b.tensors["auxiliary"], with_holonomy=False)
    p_v = b.tensors["p_v"]
    dm = b.model.dim_m
    return max(la.max_abs(np.dot(report.curvature[i, j], p_v)) for i, j in combinations(range(dm), 2))


def _auxiliary_parallel_volume(key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return parallel_residual(b.model, b.tensors["auxiliary"], b.tensors["tau_vertical"])


def _submersion(name: str, key: Key, source: str, ctx: CheckContext):
    if name in ("mixed", "horizontal-vertical", "equivariance"):
        report = _submersion_report(key, source, ctx.exact_mode, ctx.seed)
        return {"mixed": report.mixed, "horizontal-vertical": report.horizontal_vertical,
                "equivariance": report.equivariance}[name]
    b, g = _splitting_algebra(key, source, ctx.exact_mode)
    s = canonical_splitting(g, b.tau, ctx.seed)
    if name == "nearly-parallel":
        curv = ctx.torsion_report(key).curvature
        return horizontal_vertical_residual(curv, b.tau, s, bracket_coeff=0, tau_coeff=12)
    if name == "admissibility":
        return s.admissibility
    if name == "s4":
        return s4_residual(b.tau, s)
    if name == "s3-refinement":
        return s3_refinement_residual(b.tau, s)
    if name == "special-type":
        return special_type_check(s, b.tau, g, ctx.seed).consistent
    raise MalformedInputError(f"unknown submersion identity {name!r}")


def _threead_relation(which: str, key: Key, ctx: CheckContext):
    return catalog.threead_relation_residuals(ctx.bundle(key))[which]


def _phi_is_g2_form(key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return (b.tensors["phi"] - ctx.convert(catalog.build_g2_form())).max_abs()


def _contact_derivatives(key: Key, ctx: CheckContext):
    """max_i |dξ_i − 2αΦ_i − 2(α − δ) ξ_j∧ξ_k|."""
    b = ctx.bundle(key)
    alpha, delta = b.params["alpha"], b.params["delta"]
    flats = [lower(x, b.gram) for x in b.tensors["xi"]]
    worst = ctx.zero()
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        expected = b.tensors["Phi"][i] * (2 * alpha) + wedge(flats[j], flats[k]) * (2 * (alpha - delta))
        worst = max(worst, (exterior_derivative_invariant(b.model, b.tensors["xi"][i]) - expected).max_abs())
    return worst


def _nomizu_size(key: Key, ctx: CheckContext):
    return max(la.max_abs(m) for m in ctx.bundle(key).lam_tau.maps)


def _invariance(key: Key, ctx: CheckContext):
    return max(ctx.bundle(key).invariance_residuals().values())


# Sasaki


def _stiefel_torsion_form(key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return (b.tau - canonical_torsion(b.model)).max_abs()


def _d_xi(key: Key, ctx: CheckContext):
    """|dξ − 2Φ|."""
    b = ctx.bundle(key)
    return (exterior_derivative_invariant(b.model, b.tensors["xi"]) - b.tensors["omega"] * 2).max_abs()


def _nabla_phi(key: Key, ctx: CheckContext):
    """max_X |∇^g_X Φ + X∧ξ|."""
    b = ctx.bundle(key)
    lc = levi_civita(b.model)
    worst = ctx.zero()
    for i in range(b.model.dim_m):
        x = b.model.unit(i)
        lhs = covariant_derivative(b.model, lc, b.tensors["Phi"], x)
        worst = max(worst, la.max_abs(lhs + wedge_endo(x, b.tensors["xi"], b.gram)))
    return worst


def _stiefel_curvature_relation(key: Key, ctx: CheckContext):
    """max over horizontal y, y', z of |R^τ(y,y')z − R^N(y,y')z − 4ω(y,y')Jz|."""
    b = ctx.bundle(key)
    curv = ctx.torsion_report(key).curvature
    base = b.tensors["base_curvature"]
    j = b.tensors["J"]
    omega = b.tensors["omega"]
    dm = b.model.dim_m
    worst = ctx.zero()
    for p, q in combinations(range(1, dm), 2):
        diff = curv[p, q] - base[p, q] - 4 * omega[(p, q)] * j
        worst = max(worst, la.max_abs(diff[:, 1:]))
    return worst


def _stiefel_holonomy_inclusion(key: Key, ctx: CheckContext) -> bool:
    """hol(∇^τ) ⊆ hol(base) + R J, tested on the spanning elements."""
    b = ctx.bundle(key)
    hol = ctx.torsion_report(key).holonomy
    target = span_close(b.tensors["base_holonomy"].basis + [b.tensors["J"]], b.model.dim_m, b.gram)
    return hol.is_subalgebra_of(target)


def _dim3_sasaki_reeb(key: Key, ctx: CheckContext):
    """|dξ − 2 ξ⌟τ|."""
    b = ctx.bundle(key)
    xi = b.tensors["xi"]
    return (exterior_derivative_invariant(b.model, xi) - interior(xi, b.tau) * 2).max_abs()


def _parallel_tensor(name: str, key: Key, ctx: CheckContext):
    b = ctx.bundle(key)
    return parallel_residual(b.model, b.lam_tau, b.tensors[name])


# dimension 3


def _dim3_relation(key: Key, ctx: CheckContext):
    """|R^g − R^τ − t² (constant curvature)| with R^g from the Levi-Civita map."""
    b = ctx.bundle(key)
    t = b.params["t"]
    r_g = _levi_civita_curvature(key, ctx.exact_mode)
    r_tau = ctx.torsion_report(key).curvature_operator
    return (r_g - r_tau - CurvOperator.constant_curvature(3, t * t, b.gram)).max_abs()


def _dim3_flat(key: Key, ctx: CheckContext):
    """|R^τ| + |R^g − t² (constant curvature)|."""
    b = ctx.bundle(key)
    t = b.params["t"]
    r_g = _levi_civita_curvature(key, ctx.exact_mode)
    flat = ctx.torsion_report(key).curvature_operator.max_abs()
    return flat + (r_g - CurvOperator.constant_curvature(3, t * t, b.gram)).max_abs()


# splitting layer


def _decomposable(key: Key, source: str, ctx: CheckContext) -> bool:
    b, g = _splitting_algebra(key, source, ctx.exact_mode)
    return decomposability_search(g, b.tau, ctx.seed).decomposable


# properties


def _random_rational(rng: np.random.Generator, ctx: CheckContext):
    num, den = int(rng.integers(-9, 10)), int(rng.integers(1, 6))
    return ctx.scalar(Fraction(num, den))


def _random_form(rng, dim: int, degree: int, ctx: CheckContext) -> AltForm:
    keys = list(combinations(range(dim), degree))
    coeffs = {k: _random_rational(rng, ctx) for k in keys if rng.random() < 0.6}
    return AltForm(dim, degree, coeffs, ctx.mode)


def _random_matrix(rng, dim: int, ctx: CheckContext) -> np.ndarray:
    m = la.zeros((dim, dim), ctx.exact_mode)
    for i, j in product(range(dim), repeat=2):
        m[i, j] = _random_rational(rng, ctx)
    return m


CASES = 200


def _leibniz(ctx: CheckContext):
    """max over random cases of |A_*(α∧β) − A_*α∧β − α∧A_*β|."""
    worst = ctx.zero()
    for _ in range(CASES):
        dim = int(ctx.rng.integers(3, 7))
        p = int(ctx.rng.integers(1, dim))
        q = int(ctx.rng.integers(1, dim - p + 1))
        alpha, beta = _random_form(ctx.rng, dim, p, ctx), _random_form(ctx.rng, dim, q, ctx)
        a = _random_matrix(ctx.rng, dim, ctx)
        lhs = derivation_action(a, wedge(alpha, beta))
        rhs = wedge(derivation_action(a, alpha), beta) + wedge(alpha, derivation_action(a, beta))
        worst = max(worst, (lhs - rhs).max_abs())
    return worst


def _commutator_law(ctx: CheckContext):
    """max over random cases of |[A_*, B_*]α − [A, B]_*α|."""
    worst = ctx.zero()
    for _ in range(CASES):
        dim = int(ctx.rng.integers(3, 7))
        degree = int(ctx.rng.integers(1, dim + 1))
        alpha = _random_form(ctx.rng, dim, degree, ctx)
        a, b = _random_matrix(ctx.rng, dim, ctx), _random_matrix(ctx.rng, dim, ctx)
        lhs = derivation_action(a, derivation_action(b, alpha)) - derivation_action(b, derivation_action(a, alpha))
        worst = max(worst, (lhs - derivation_action(bracket(a, b), alpha)).max_abs())
    return worst


def _riemann_residual(name: str, key: Key, ctx: CheckContext):
    return ctx.riemann(key).residuals[name]


def _two_form_round_trip(ctx: CheckContext):
    """max over random 2-forms and Gram matrices of |endo_form(form_endo(α)) − α|."""
    worst = ctx.zero()
    for _ in range(CASES // 4):
        dim = int(ctx.rng.integers(2, 7))
        diag = [ctx.scalar(Fraction(int(ctx.rng.integers(1, 6)), int(ctx.rng.integers(1, 4)))) for _ in range(dim)]
        gram = ctx.eye(dim)
        for i, d in enumerate(diag):
            gram[i, i] = d
        alpha = _random_form(ctx.rng, dim, 2, ctx)
        worst = max(worst, (endo_form(form_endo(alpha, gram), gram) - alpha).max_abs())
    return worst


# registry


KXK_VALUES = ("0", "1/2", "1", "2")
GRAY_HOLONOMY = {"s6": 8, "flag": 2, "cp3": 4, "s3s3": 3}
CATALOG_KEYS = [
    model_key("kxk", t=Fraction(1, 2)),
    model_key("kxk", t=Fraction(2)),
    model_key("symmetric-su2"),
    model_key("s6"),
    model_key("flag"),
    model_key("cp3"),
    model_key("s3s3"),
    model_key("berger"),
    model_key("3ad-sphere"),
    model_key("3ad-sphere", delta=Fraction(3)),
    model_key("stiefel", n=3),
    model_key("dim3", t=Fraction(1)),
    model_key("dim3", t=Fraction(1), scale=Fraction(1)),
    model_key("dim3", t=Fraction(1), variant="sasaki"),
]
NG2 = model_key("3ad-sphere")
STIEFEL = model_key("stiefel", n=3)


def _core_checks() -> List[Check]:
    g2, su3 = model_key("g2-form"), model_key("su3-form")
    checks = [
        Check("g2-form-stabilizer-dim", "core", "g2-stabilizer", "g2-form", partial(_stabilizer_dim, g2), 14),
        Check("su3-form-stabilizer-dim", "core", "su3-stabilizer", "su3-form", partial(_stabilizer_dim, su3), 8),
        Check("curvature-space-so3-standard", "core", "curvature-space-so3",
              None, partial(_curvature_space, "so3-standard"), 6),
        Check("curvature-space-su3-adjoint", "core", "curvature-space-su3",
              None, partial(_curvature_space, "su3-adjoint"), 1),
        Check("curvature-space-so3-irreducible-r7", "core", "curvature-space-irreducible-so3",
              None, partial(_curvature_space, "so3-harmonic-cubics"), 0),
        Check("g2-bracket-identity", "core", "g2-bracket", "g2-form", _g2_bracket_identity),
        Check("g2-anticommutator-identity", "core", "g2-anticommutator", "g2-form", _g2_anticommutator_identity),
    ]
    checks += [Check(f"casimir-so-{n}", "core", "casimir", None, partial(_casimir, n)) for n in range(3, 9)]
    return checks


def _classification_checks() -> List[Check]:
    suite = "cs-classification"
    checks = []
    for t in KXK_VALUES:
        label = f"kxk(t={t})"
        checks += [
            Check(f"kxk-torsion-t{t.replace('/', '-')}", suite, "kxk-torsion", label, partial(_kxk_torsion, t)),
            Check(f"kxk-curvature-t{t.replace('/', '-')}", suite, "kxk-curvature", label,
                  partial(_kxk_curvature, t)),
        ]
    for t, dim in (("0", 3), ("1/2", 3), ("2", 3), ("1", 0), ("-1", 0)):
        checks.append(Check(f"kxk-holonomy-t{t.replace('/', '-')}", suite, "kxk-holonomy", f"kxk(t={t})",
                            partial(_kxk_holonomy, t), dim))
    for t, kappa in (("1/2", Fraction(3)), ("1", Fraction(0)), ("2", Fraction(-3, 4))):
        checks.append(Check(f"kxk-kappa-t{t.replace('/', '-')}", suite, "kxk-kappa", f"kxk(t={t})",
                            partial(_kxk_kappa, t), kappa))
    symmetric = model_key("symmetric-su2")
    checks += [
        Check("symmetric-su2-is-symmetric", suite, "symmetric-pair", "symmetric-su2",
              partial(_is_symmetric, symmetric), True),
        Check("symmetric-su2-levi-civita-is-canonical", suite, "symmetric-levi-civita", "symmetric-su2",
              partial(_levi_civita_is_canonical, symmetric)),
    ]
    for name, dim in (("s6", 8), ("flag", 2), ("berger", 3), ("cp3", 4), ("s3s3", 3)):
        key = model_key(name)
        checks += [
            Check(f"canonical-holonomy-dim-{name}", suite, "canonical-holonomy", name,
                  partial(_canonical_holonomy_dim, key), dim),
            Check(f"canonical-holonomy-is-isotropy-bracket-{name}", suite, "canonical-holonomy", name,
                  partial(_holonomy_is_isotropy_bracket, key)),
        ]
    berger = model_key("berger")
    checks += [
        Check("berger-stabilizer-dim", suite, "berger-stabilizer", "berger", partial(_stabilizer_dim, berger), 14),
        Check("berger-isotropy-irreducible", suite, "berger-irreducible", "berger",
              partial(_isotropy_symmetric_commutant, berger), 1),
        Check("berger-curvature-space-vanishes", suite, "curvature-space-irreducible-so3", "berger",
              partial(_isotropy_curvature_space, berger), 0),
    ]
    # so(3)⊕so(3)⊕so(3) on S³×S³ and su(3) on the flag manifold
    for name, profile in (("s3s3", (9, True, "negative definite", (3, 3, 3), True)),
                          ("flag", (8, True, "negative definite", (8,), True))):
        checks.append(Check(f"{name}-transvection", suite, "transvection-compact", name,
                            partial(_transvection_profile, model_key(name)), profile))
    return checks


def _gray_checks() -> List[Check]:
    suite = "gray"
    checks = []
    for name in catalog.GRAY_MODELS:
        key = model_key(name)
        checks += [
            Check(f"gray-{name}-stabilizer-dim", suite, "gray-stabilizer", name, partial(_stabilizer_dim, key), 8),
            Check(f"gray-{name}-torsion-anticommutes-with-j", suite, "gray-holomorphic", name,
                  partial(_gray_holomorphic, 0, key)),
            Check(f"gray-{name}-torsion-x-jx-vanishes", suite, "gray-x-jx", name,
                  partial(_gray_holomorphic, 1, key)),
            Check(f"gray-{name}-holonomy-dim", suite, "gray-holonomy", name,
                  partial(_torsion_holonomy_dim, key), GRAY_HOLONOMY[name]),
        ]
    for name in ("flag", "cp3"):
        key = model_key(name)
        checks += [
            Check(f"gray-{name}-torsion-norm", suite, "gray-norm", name, partial(_gray_norm, key), Fraction(1, 4)),
            Check(f"gray-{name}-twistor-constant", suite, "gray-twistor", name, partial(_gray_twistor, key), 16),
        ]
    checks.append(Check("gray-s3s3-torsion-curvature-not-proportional", suite, "gray-not-proportional", "s3s3",
                        partial(_kappa_fit_residual, model_key("s3s3")), NONZERO))
    return checks


def _ng2_checks() -> List[Check]:
    suite = "ng2"
    key = NG2
    off = model_key("3ad-sphere", gamma=Fraction(4))
    return [
        Check("ng2-torsion-proportional-to-phi", suite, "ng2-torsion", "3ad-sphere",
              partial(_torsion_minus_phi, key)),
        Check("ng2-stabilizer-dim", suite, "ng2-stabilizer", "3ad-sphere", partial(_stabilizer_dim, key), 14),
        Check("ng2-parallel-torsion-canonical", suite, "threead-parallel-torsion", "3ad-sphere",
              partial(_parallel_torsion, key)),
        Check("ng2-parallel-torsion-off-canonical", suite, "threead-parallel-torsion", "3ad-sphere(gamma=4)",
              partial(_parallel_torsion, off), NONZERO),
        Check("ng2-vertical-constant", suite, "ng2-vertical-constant", "3ad-sphere",
              partial(_vertical_constant, key), -24),
        Check("ng2-ricci-torsion", suite, "ng2-ricci-torsion", "3ad-sphere", partial(_ricci_torsion, key)),
        Check("ng2-ricci-levi-civita", suite, "ng2-ricci-levi-civita", "3ad-sphere",
              partial(_ricci_levi_civita, key)),
        Check("ng2-holonomy-dim", suite, "ng2-holonomy", "3ad-sphere", partial(_torsion_holonomy_dim, key), 6),
        Check("ng2-holonomy-in-vertical-block", suite, "ng2-holonomy-block", "3ad-sphere",
              partial(_holonomy_in_vertical_block, key)),
        Check("ng2-auxiliary-flat-on-vertical", suite, "ng2-auxiliary-flat", "3ad-sphere",
              partial(_auxiliary_flat_on_vertical, key)),
        Check("ng2-auxiliary-parallel-vertical-volume", suite, "ng2-auxiliary-volume", "3ad-sphere",
              partial(_auxiliary_parallel_volume, key)),
        Check("ng2-mixed-curvature-vanishes", suite, "mixed-curvature", "3ad-sphere",
              partial(_submersion, "mixed", key, "hol")),
        Check("ng2-horizontal-vertical-identity", suite, "horizontal-vertical", "3ad-sphere",
              partial(_submersion, "horizontal-vertical", key, "hol")),
        Check("ng2-horizontal-vertical-nearly-parallel", suite, "ng2-horizontal-vertical", "3ad-sphere",
              partial(_submersion, "nearly-parallel", key, "hol")),
        Check("ng2-vertical-equivariance", suite, "vertical-equivariance", "3ad-sphere",
              partial(_submersion, "equivariance", key, "hol")),
    ]


def _threead_checks() -> List[Check]:
    suite = "threead"
    checks = []
    for n, alpha, delta in ((1, 1, 5), (2, 1, 3), (2, 2, 1)):
        key = model_key("3ad-tensors", n=n, alpha=Fraction(alpha), delta=Fraction(delta))
        label = _key_label(key)
        tag = f"n{n}-a{alpha}-d{delta}"
        checks += [
            Check(f"threead-square-{tag}", suite, "threead-square", label,
                  partial(_threead_relation, "square", key)),
            Check(f"threead-cross-{tag}", suite, "threead-cross", label, partial(_threead_relation, "cross", key)),
            Check(f"threead-horizontal-{tag}", suite, "threead-horizontal", label,
                  partial(_threead_relation, "horizontal", key)),
        ]
    n1 = model_key("3ad-tensors", n=1, alpha=Fraction(1), delta=Fraction(5))
    n2 = model_key("3ad-tensors", n=2, alpha=Fraction(1), delta=Fraction(5))
    checks += [
        Check("threead-g2-form-in-dimension-7", suite, "threead-g2-form", _key_label(n1),
              partial(_phi_is_g2_form, n1)),
        Check("threead-stabilizer-n1-nearly-parallel", suite, "threead-stabilizer-g2", _key_label(n1),
              partial(_stabilizer_dim, n1), 14),
        Check("threead-stabilizer-n2", suite, "threead-stabilizer", _key_label(n2),
              partial(_stabilizer_dim, n2), 13),
    ]
    for delta in (3, 5):
        key = model_key("3ad-sphere", delta=Fraction(delta))
        label = _key_label(key)
        checks += [
            Check(f"threead-sphere-contact-derivatives-d{delta}", suite, "threead-contact", label,
                  partial(_contact_derivatives, key)),
            Check(f"threead-sphere-parallel-torsion-d{delta}", suite, "threead-parallel-torsion", label,
                  partial(_parallel_torsion, key)),
            Check(f"threead-sphere-invariant-tensors-d{delta}", suite, "threead-invariant-tensors", label,
                  partial(_invariance, key)),
        ]
    parallel = model_key("3ad-sphere", delta=Fraction(2))
    checks.append(Check("threead-sphere-parallel-frame-d2", suite, "threead-parallel-frame",
                        _key_label(parallel), partial(_nomizu_size, parallel)))
    return checks


def _sasaki_checks() -> List[Check]:
    suite = "sasaki"
    key = STIEFEL
    dim3 = model_key("dim3", t=Fraction(1), variant="sasaki")
    return [
        Check("stiefel-stabilizer-dim", suite, "sasaki-stabilizer", "stiefel(n=3)", partial(_stabilizer_dim, key), 9),
        Check("stiefel-holonomy-dim", suite, "stiefel-holonomy", "stiefel(n=3)",
              partial(_torsion_holonomy_dim, key), 3),
        Check("stiefel-torsion-is-canonical", suite, "sasaki-torsion", "stiefel(n=3)",
              partial(_stiefel_torsion_form, key)),
        Check("stiefel-d-xi", suite, "sasaki-d-xi", "stiefel(n=3)", partial(_d_xi, key)),
        Check("stiefel-nabla-phi", suite, "sasaki-nabla-phi", "stiefel(n=3)", partial(_nabla_phi, key)),
        Check("stiefel-curvature-relation", suite, "stiefel-curvature", "stiefel(n=3)",
              partial(_stiefel_curvature_relation, key)),
        # the u(n) splitting has V = Rξ; the holonomy one puts everything in V
        Check("stiefel-mixed-curvature-vanishes", suite, "mixed-curvature", "stiefel(n=3)",
              partial(_submersion, "mixed", key, "stab")),
        Check("stiefel-holonomy-inclusion", suite, "stiefel-holonomy-inclusion", "stiefel(n=3)",
              partial(_stiefel_holonomy_inclusion, key), True),
        Check("stiefel-invariant-tensors", suite, "stiefel-invariant-tensors", "stiefel(n=3)",
              partial(_invariance, key)),
        Check("stiefel-parallel-reeb", suite, "sasaki-parallel-reeb", "stiefel(n=3)",
              partial(_parallel_tensor, "xi", key)),
        Check("dim3-sasaki-holonomy-dim", suite, "berger-sphere-holonomy", "dim3(sasaki)",
              partial(_torsion_holonomy_dim, dim3), 1),
        Check("dim3-sasaki-reeb-derivative", suite, "sasaki-reeb-derivative", "dim3(sasaki)",
              partial(_dim3_sasaki_reeb, dim3)),
        Check("dim3-sasaki-parallel-reeb", suite, "sasaki-parallel-reeb", "dim3(sasaki)",
              partial(_parallel_tensor, "xi", dim3)),
    ]


def _dim3_checks() -> List[Check]:
    suite = "dim3"
    checks = []
    for t in (1, 2):
        flat = model_key("dim3", t=Fraction(t))
        curved = model_key("dim3", t=Fraction(t), scale=Fraction(1))
        checks += [
            Check(f"dim3-torsion-curvature-relation-t{t}", suite, "dim3-relation", _key_label(curved),
                  partial(_dim3_relation, curved)),
            Check(f"dim3-flat-constant-curvature-t{t}", suite, "dim3-flat", _key_label(flat),
                  partial(_dim3_flat, flat)),
            Check(f"dim3-parallel-torsion-t{t}", suite, "dim3-parallel", _key_label(curved),
                  partial(_parallel_torsion, curved)),
        ]
    sasaki = model_key("dim3", t=Fraction(1), variant="sasaki")
    checks.append(Check("dim3-torsion-curvature-relation-sasaki", suite, "dim3-relation",
                        _key_label(sasaki), partial(_dim3_relation, sasaki)))
    return checks


D3 = model_key("3ad-sphere", delta=Fraction(3))
SPLITTING_PAIRS = (
    (NG2, "hol"), (D3, "hol"), (STIEFEL, "hol"), (STIEFEL, "stab"), (model_key("flag"), "hol"),
    (model_key("cp3"), "hol"), (model_key("s3s3"), "hol"), (model_key("berger"), "stab"),
    (model_key("kxk", t=Fraction(1, 2)), "stab"), (model_key("product-vol3"), "given"),
)


def _splitting_checks() -> List[Check]:
    suite = "splitting"
    checks = []
    for key, source in SPLITTING_PAIRS:
        label = _key_label(key)
        tag = f"{_slug(label)}-{source}"
        checks += [
            Check(f"admissible-{tag}", suite, "admissible", label, partial(_submersion, "admissibility", key, source)),
            Check(f"s4-{tag}", suite, "s4", label, partial(_submersion, "s4", key, source)),
        ]
    for key, source in ((NG2, "hol"), (D3, "hol"), (STIEFEL, "stab")):
        label = _key_label(key)
        checks.append(Check(f"s3-refinement-{_slug(label)}-{source}", suite, "s3-refinement", label,
                            partial(_submersion, "s3-refinement", key, source)))
    for key in (D3, model_key("s3s3")):
        label = _key_label(key)
        checks.append(Check(f"vertical-equivariance-{_slug(label)}-hol", suite, "vertical-equivariance", label,
                            partial(_submersion, "equivariance", key, "hol")))
    for key in (NG2, D3):
        label = _key_label(key)
        checks.append(Check(f"special-type-{_slug(label)}-hol", suite, "special-type", label,
                            partial(_submersion, "special-type", key, "hol"), True))
    checks += [
        Check("decomposable-product-vol3", suite, "decomposable", "product-vol3",
              partial(_decomposable, model_key("product-vol3"), "given"), True),
        Check("indecomposable-g2-form", suite, "indecomposable", "g2-form",
              partial(_decomposable, model_key("g2-form"), "stab"), False),
        Check("indecomposable-threead-tensor", suite, "indecomposable", "3ad-tensors(n=2)",
              partial(_decomposable, model_key("3ad-tensors", n=2, alpha=Fraction(1), delta=Fraction(5)), "stab"),
              False),
    ]
    return checks


def _property_checks() -> List[Check]:
    suite = "properties"
    checks = [
        Check("leibniz-rule", suite, "leibniz", None, _leibniz),
        Check("commutator-law", suite, "commutator", None, _commutator_law),
        Check("two-form-dictionary", suite, "two-form-dictionary", None, _two_form_round_trip),
    ]
    for key in CATALOG_KEYS:
        label = _key_label(key)
        checks += [
            Check(f"bianchi-{_slug(label)}", suite, "bianchi", label, partial(_riemann_residual, "bianchi", key)),
            Check(f"bracket-form-{_slug(label)}", suite, "bracket-form", label,
                  partial(_riemann_residual, "bracket_form", key)),
            Check(f"levi-civita-{_slug(label)}", suite, "levi-civita", label,
                  partial(_riemann_residual, "levi_civita", key)),
        ]
    return checks


def _build_registry() -> List[Check]:
    checks = (_core_checks() + _classification_checks() + _gray_checks() + _ng2_checks() + _threead_checks()
              + _sasaki_checks() + _dim3_checks() + _splitting_checks() + _property_checks())
    ids = [c.id for c in checks]
    duplicates = {i for i in ids if ids.count(i) > 1}
    if duplicates:
        raise RuntimeError(f"duplicate check ids: {sorted(duplicates)}")
    unresolved = {c.ref for c in checks if c.ref not in CITATIONS}
    if unresolved:
        raise RuntimeError(f"checks cite unknown references: {sorted(unresolved)}")
    return checks


CHECKS: List[Check] = _build_registry()


def checks_for(name: str) -> List[Check]:
    if name == "all":
        return list(CHECKS)
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}, expected one of {', '.join(SUITES + ('all',))}")
    return [c for c in CHECKS if c.suite == name]


def list_suites() -> Dict[str, int]:
    counts = {name: len(checks_for(name)) for name in SUITES}
    counts["all"] = len(CHECKS)
    return counts


def run_suite(name: str, seed: Optional[int] = None, tol: Optional[float] = None,
              mode: Optional[str] = None) -> SuiteReport:
    """Run every check of a suite; results are ordered by id."""
    seed = settings.SEED if seed is None else seed
    tol = settings.TOL if tol is None else tol
    mode = settings.MODE if mode is None else mode
    if mode not in ("exact", "float"):
        raise MalformedInputError(f"unknown scalar mode {mode!r}")
    if tol <= 0:
        raise MalformedInputError(f"tolerance must be positive, got {tol}")
    checks = checks_for(name)
    report = SuiteReport(suite=name, seed=seed, mode=mode, tol=None if mode == "exact" else tol,
                         version=settings.API_VERSION)
    for check in sorted(checks, key=lambda c: c.id):
        report.checks.append(run_check(check, mode, seed, tol))
    logger.info("suite %s (%s, seed %d): %d passed, %d failed, %d skipped", name, mode, seed,
                report.passed, report.failed, report.skipped)
    return report
