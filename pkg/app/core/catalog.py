"""Exact rational builders for the concrete models.

Every builder returns a :class:`ModelBundle`: the reductive model (when the
structure is homogeneous), its torsion 3-form and the named invariant tensors.
Matrix realizations are chosen with integer entries; metrics are carried as
rational Gram matrices on m, so no square roots are ever taken.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Callable, Dict, List, Mapping, Optional

import numpy as np

from app.core import linalg as la
from app.core.errors import DegenerateFormError, MalformedInputError, UnknownModelError
from app.core.exterior import (
    AltForm,
    CurvOperator,
    endo_form,
    form_endo,
    lower,
    torsion_endo,
    wedge,
)
from app.core.liealg import (
    LieSubalgebra,
    commutant,
    restrict,
    so_algebra,
    span_close,
    stabilizer,
)
from app.core.reductive import (
    NomizuMap,
    ReductiveModel,
    canonical_torsion,
    complement,
    riemann_from_tau,
    torsion_endos,
    with_torsion,
)

logger = logging.getLogger(__name__)

GRAY_MODELS = ("s6", "flag", "cp3", "s3s3")


@dataclass
class ModelBundle:
    name: str
    params: Dict[str, object]
    model: Optional[ReductiveModel]
    tau: AltForm
    tensors: Dict[str, object] = field(default_factory=dict)
    samples: Dict[str, object] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.tau.dim

    @property
    def gram(self) -> np.ndarray:
        if self.model is not None:
            return self.model.gram
        g = la.eye(self.dim, self.tau.mode == "exact")
        return g

    @property
    def exact_mode(self) -> bool:
        return self.tau.mode == "exact"

    @cached_property
    def lam_tau(self) -> NomizuMap:
        """Nomizu map of ∇^τ = ∇^g + τ."""
        if self.model is None:
            raise UnknownModelError(f"{self.name} carries no homogeneous model")
        return with_torsion(self.model, self.tau)

    def invariance_residuals(self) -> Dict[str, object]:
        """Isotropy residual of τ and of every named vector, endomorphism and form."""
        if self.model is None:
            return {}
        out = {"tau": self.model.invariance_residual(self.tau)}
        for key, value in self.tensors.items():
            if isinstance(value, (AltForm, CurvOperator)) or (isinstance(value, np.ndarray) and value.ndim <= 2):
                out[key] = self.model.invariance_residual(value)
            elif isinstance(value, list) and value and all(isinstance(v, (AltForm, np.ndarray)) for v in value):
                for i, v in enumerate(value, 1):
                    if isinstance(v, AltForm) or v.ndim <= 2:
                        out[f"{key}{i}"] = self.model.invariance_residual(v)
        return out

    def as_float(self) -> "ModelBundle":
        return ModelBundle(
            name=self.name,
            params=dict(self.params),
            model=self.model.as_float() if self.model is not None else None,
            tau=self.tau.as_float(),
            tensors={k: to_float(v) for k, v in self.tensors.items()},
            samples={k: to_float(v) for k, v in self.samples.items()},
            notes=list(self.notes),
        )


def to_float(value):
    """Float copy of a bundle entry; rationals become floats, other values pass through."""
    if isinstance(value, (AltForm, CurvOperator, NomizuMap, LieSubalgebra, ReductiveModel)):
        return value.as_float()
    if isinstance(value, np.ndarray):
        return la.as_float(value)
    if isinstance(value, list):
        return [to_float(v) for v in value]
    if isinstance(value, Fraction):
        return float(value)
    return value


def rational_sqrt(q) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, None when it is irrational."""
    q = Fraction(q)
    if q < 0:
        return None
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def _e(n: int, i: int, j: int) -> np.ndarray:
    """The skew endomorphism e_i ↦ e_j, e_j ↦ −e_i (0-based)."""
    return form_endo(AltForm.basis(n, i, j))


def su2_basis() -> List[np.ndarray]:
    """L_1, L_2, L_3 with L_i v = e_i × v, so [L_i, L_j] = ε_ijk L_k."""
    return [_e(3, 1, 2), _e(3, 2, 0), _e(3, 0, 1)]


def _block_diag(*blocks: np.ndarray) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = la.zeros((n, n))
    k = 0
    for b in blocks:
        d = b.shape[0]
        out[k:k + d, k:k + d] = b
        k += d
    return out


def _realify(re, im) -> np.ndarray:
    """Real 2n x 2n matrix of the complex matrix re + i im."""
    re, im = np.asarray(re), np.asarray(im)
    return la.exact(np.block([[re, -im], [im, re]]))


def _parse_rational(value, name: str) -> Fraction:
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise MalformedInputError(f"parameter {name}: {value!r} is not a rational number") from exc


# (K x K)/K


def build_kxk(t=Fraction(1, 2)) -> ModelBundle:
    """(SU(2) x SU(2))/SU(2) with m_t = {((t−1)X, (t+1)X)} and the bi-invariant metric."""
    t = _parse_rational(t, "t")
    ls = su2_basis()
    h = [_block_diag(l, l) for l in ls]
    m = [_block_diag((t - 1) * l, (t + 1) * l) for l in ls]
    model = ReductiveModel.from_matrices(h, m, gram=la.eye(3), name=f"kxk(t={t})")
    structure = la.zeros((3, 3, 3))
    for i, j in combinations(range(3), 2):
        k = 3 - i - j
        sign = 1 if (j - i) % 3 == 1 else -1
        structure[i, j, k], structure[j, i, k] = sign, -sign
    return ModelBundle(
        name="kxk",
        params={"t": t},
        model=model,
        tau=canonical_torsion(model),
        tensors={"structure": structure},
        notes=["m carries the Gram matrix of the bi-invariant metric, identity on the L_i"],
    )


def build_symmetric_su2() -> ModelBundle:
    """The t = 0 member, the symmetric space (K x K)/K with its Levi-Civita connection."""
    bundle = build_kxk(0)
    bundle.name = "symmetric-su2"
    bundle.notes.append("symmetric pair: [m, m] ⊆ h, canonical connection = Levi-Civita")
    return bundle


# exterior primitives


def build_g2_form(mode: str = "exact") -> AltForm:
    """φ = e123 + e145 + e167 + e246 − e257 − e347 − e356."""
    terms = [((0, 1, 2), 1), ((0, 3, 4), 1), ((0, 5, 6), 1), ((1, 3, 5), 1),
             ((1, 4, 6), -1), ((2, 3, 6), -1), ((2, 4, 5), -1)]
    return AltForm.from_terms(7, 3, terms, mode)


def build_su3_form(mode: str = "exact") -> AltForm:
    """Re(dz1∧dz2∧dz3) = e135 − e146 − e236 − e245 with z_k = e_{2k−1} + i e_{2k}."""
    terms = [((0, 2, 4), 1), ((0, 3, 5), -1), ((1, 2, 5), -1), ((1, 3, 4), -1)]
    return AltForm.from_terms(6, 3, terms, mode)


def build_product_vol3() -> ModelBundle:
    """vol₃ ⊕ vol₃ on R^6 with g = so(3) ⊕ so(3), a decomposable torsion."""
    tau = AltForm.from_terms(6, 3, [((0, 1, 2), 1), ((3, 4, 5), 1)])
    zero = la.zeros((3, 3))
    ls = su2_basis()
    g = LieSubalgebra(6, [_block_diag(l, zero) for l in ls] + [_block_diag(zero, l) for l in ls])
    return ModelBundle(name="product-vol3", params={}, model=None, tau=tau, tensors={"g": g})


def _form_bundle(name: str, form: AltForm) -> ModelBundle:
    return ModelBundle(name=name, params={}, model=None, tau=form)


# Gray manifolds


def _g2_algebra() -> LieSubalgebra:
    return stabilizer(build_g2_form())


def _gray_s6() -> ReductiveModel:
    g2 = _g2_algebra()
    # su(3): the elements of g2 fixing e_7
    columns = la.stack_columns([a[:, 6] for a in g2.basis], 7)
    kernel = la.nullspace(columns)
    h = [g2.element(kernel[:, c]) for c in range(kernel.shape[1])]
    return ReductiveModel.from_matrices(h, complement(g2.basis, h), name="G2/SU(3)")


def su3_basis() -> List[np.ndarray]:
    """su(3) realified on R^6: the Cartan pair first, then A_jk, S_jk for j < k."""
    zero = np.zeros((3, 3), dtype=int)

    def unit(j, k):
        m = np.zeros((3, 3), dtype=int)
        m[j, k] = 1
        return m

    basis = [_realify(zero, np.diag([1, -1, 0])), _realify(zero, np.diag([0, 1, -1]))]
    for j, k in ((0, 1), (0, 2), (1, 2)):
        basis.append(_realify(unit(j, k) - unit(k, j), zero))
        basis.append(_realify(zero, unit(j, k) + unit(k, j)))
    return basis


def su3_adjoint() -> LieSubalgebra:
    """ad(su(3)) on R^8 with the trace form as metric."""
    su3 = LieSubalgebra(6, su3_basis())
    return LieSubalgebra(8, su3.ad_matrices(), su3.trace_form())


def so3_harmonic_cubics() -> LieSubalgebra:
    """so(3) acting irreducibly on the 7-dimensional space of harmonic cubics.

    Cubic polynomials carry the invariant Fischer product ⟨x^a, x^b⟩ = a! δ_ab;
    the harmonic cubics are the kernel of the Laplacian.
    """
    exps = [e for e in product(range(4), repeat=3) if sum(e) == 3]
    index = {e: i for i, e in enumerate(exps)}
    fischer = la.exact(np.diag([math.factorial(a) * math.factorial(b) * math.factorial(c) for a, b, c in exps]))
    action = []
    for l in su2_basis():
        d = la.zeros((10, 10))
        for col, e in enumerate(exps):
            # the vector field x ↦ Lx applied to x^e
            for k in range(3):
                if e[k] == 0:
                    continue
                for j in range(3):
                    if l[k, j] == 0:
                        continue
                    new = list(e)
                    new[k] -= 1
                    new[j] += 1
                    d[index[tuple(new)], col] += l[k, j] * e[k]
        action.append(d)
    laplacian = la.zeros((3, 10))
    for col, e in enumerate(exps):
        for k in range(3):
            if e[k] >= 2:
                new = list(e)
                new[k] -= 2
                laplacian[new.index(1), col] += e[k] * (e[k] - 1)
    harmonic = la.nullspace(laplacian)
    mats, gram = restrict(action, fischer, harmonic)
    return LieSubalgebra(7, mats, gram)


def _gray_flag() -> ReductiveModel:
    basis = su3_basis()
    return ReductiveModel.from_matrices(basis[:2], basis[2:], name="SU(3)/T2")


def _gray_cp3() -> ReductiveModel:
    e = lambda i, j: _e(5, i, j)  # noqa: E731
    h = [e(0, 1), e(2, 3), e(0, 2) + e(1, 3), e(0, 3) - e(1, 2)]
    m = [e(0, 2) - e(1, 3), e(0, 3) + e(1, 2)] + [e(a, 4) for a in range(4)]
    return ReductiveModel.from_matrices(h, m, name="SO(5)/U(2)")


def _gray_s3s3() -> ReductiveModel:
    ls = su2_basis()
    zero = la.zeros((3, 3))
    h = [_block_diag(l, l, l) for l in ls]
    g = ([_block_diag(l, zero, zero) for l in ls] + [_block_diag(zero, l, zero) for l in ls]
         + [_block_diag(zero, zero, l) for l in ls])
    return ReductiveModel.from_matrices(h, complement(g, h), name="SU(2)^3/SU(2)")


_GRAY_REALIZATIONS: Dict[str, Callable[[], ReductiveModel]] = {
    "s6": _gray_s6,
    "flag": _gray_flag,
    "cp3": _gray_cp3,
    "s3s3": _gray_s3s3,
}


def invariant_complex_structure(g: LieSubalgebra):
    """The g-invariant skew J₀ with J₀² = −μ Id, from the skew commutant of g."""
    skew = commutant(g).skew
    if len(skew) != 1:
        raise DegenerateFormError(f"expected a one-dimensional skew commutant, found {len(skew)}")
    j0 = skew[0]
    sq = np.dot(j0, j0)
    mu = -sq[0, 0]
    if not la.is_zero(sq + mu * la.eye(g.n, g.exact_mode)) or mu <= 0:
        raise DegenerateFormError("skew commutant element does not square to a negative multiple of Id")
    return j0, mu


def build_gray(name: str = "s6") -> ModelBundle:
    """Homogeneous strict nearly Kähler 6-manifolds with the metric −tr(XY) on m."""
    if name not in _GRAY_REALIZATIONS:
        raise UnknownModelError(f"unknown Gray model {name!r}, expected one of {', '.join(GRAY_MODELS)}")
    model = _GRAY_REALIZATIONS[name]()
    tau = canonical_torsion(model)
    stab = stabilizer(tau, model.gram)
    j0, mu = invariant_complex_structure(stab)
    root = rational_sqrt(mu)
    scal = riemann_from_tau(model, tau, NomizuMap.zero(model.dim_m)).scal
    bundle = ModelBundle(
        name=name,
        params={"scal": scal, "rescale": Fraction(30) / scal, "mu": mu},
        model=model,
        tau=tau,
        tensors={"J0": j0},
        notes=[f"metric −tr(XY) on {model.name}; the scal = 30 normalization rescales squared norms by 30/scal",
               "J0 spans the skew commutant of stab(τ); J0² = −mu Id"],
    )
    if root is not None:
        bundle.tensors["J"] = j0 / root
        bundle.tensors["omega"] = endo_form(j0 / root, model.gram)
    else:
        bundle.notes.append("mu is not a rational square, J is kept as J0")
    if name in ("flag", "cp3"):
        # tangent to the fibre of the twistor fibration
        bundle.samples["vertical"] = model.unit(0)
    return bundle


def gray_holomorphic_residuals(bundle: ModelBundle):
    """max |τ_X J + J τ_X| and max |τ_X JY + τ_Y JX| over basis vectors, with J = J0."""
    model, tau, j0 = bundle.model, bundle.tau, bundle.tensors["J0"]
    endos = torsion_endos(model, tau)
    anti = max(la.max_abs(np.dot(t, j0) + np.dot(j0, t)) for t in endos)
    worst = la.max_abs(la.zeros(1, bundle.exact_mode))
    for i in range(model.dim_m):
        for j in range(i, model.dim_m):
            value = np.dot(endos[i], j0[:, j]) + np.dot(endos[j], j0[:, i])
            worst = max(worst, la.max_abs(value))
    return anti, worst


def gray_norm_constant(bundle: ModelBundle):
    """|τ_X Y|² at scal = 30 for X ⊥ Y, JY; X is the first basis vector."""
    model, tau, j0 = bundle.model, bundle.tau, bundle.tensors["J0"]
    g = model.gram
    x = model.unit(0)
    plane = la.stack_columns([x, np.dot(j0, x)], model.dim_m, model.exact_mode)
    y = la.orthogonal_complement(plane, g)[:, 0]
    txy = np.dot(torsion_endo(tau, x, g), y)
    ratio = np.dot(txy, np.dot(g, txy)) / (np.dot(x, np.dot(g, x)) * np.dot(y, np.dot(g, y)))
    return ratio * bundle.params["rescale"]


def gray_twistor_constant(bundle: ModelBundle, v=None):
    """−tr((4Jτ_V)²)/|V|² at scal = 30."""
    model, tau, j0 = bundle.model, bundle.tau, bundle.tensors["J0"]
    v = bundle.samples.get("vertical", model.unit(0)) if v is None else v
    t = torsion_endo(tau, v, model.gram)
    jt = 4 * np.dot(j0, t)
    value = -np.trace(np.dot(jt, jt)) / bundle.params["mu"]
    return value / np.dot(v, np.dot(model.gram, v)) * bundle.params["rescale"]


# Berger space


def _sym0_coordinates(s: np.ndarray) -> np.ndarray:
    """Coordinates of a traceless symmetric 3x3 matrix in u1..u5."""
    half = Fraction(1, 2)
    return la.exact([s[0, 1], s[0, 2], s[1, 2], half * (s[0, 0] - s[1, 1]), -half * s[2, 2]])


def _sym0_basis() -> List[np.ndarray]:
    basis = [np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]]), np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]]),
             np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]]), np.diag([1, -1, 0]), np.diag([1, 1, -2])]
    return [la.exact(b) for b in basis]


def build_berger() -> ModelBundle:
    """SO(5)/SO(3) with SO(3) acting irreducibly on R^5 = traceless symmetric 3x3 matrices."""
    us = _sym0_basis()
    gram5 = la.exact([[np.trace(np.dot(a, b)) for b in us] for a in us])
    h = []
    for l in su2_basis():
        r = la.zeros((5, 5))
        for j, u in enumerate(us):
            r[:, j] = _sym0_coordinates(np.dot(l, u) - np.dot(u, l))
        h.append(r)
    so5 = so_algebra(5, gram5)
    model = ReductiveModel.from_matrices(h, complement(so5.basis, h), name="SO(5)/SO(3)irr")
    return ModelBundle(
        name="berger",
        params={},
        model=model,
        tau=canonical_torsion(model),
        samples={"gram_r5": gram5},
        notes=["R^5 carries the trace form on traceless symmetric matrices, Gram diag(2, 2, 2, 2, 6)"],
    )


# 3-(α, δ)-Sasaki structures


def _quaternionic_phis(n_blocks: int, offset: int, dim: int) -> List[AltForm]:
    """Φ_1^H, Φ_2^H, Φ_3^H on the horizontal blocks of R^dim, starting at ``offset``."""
    phis = [AltForm.zero(dim, 2) for _ in range(3)]
    for b in range(n_blocks):
        p, q, r, s = (offset + 4 * b + k for k in range(4))
        phis[0] = phis[0] + AltForm.from_terms(dim, 2, [((p, q), 1), ((r, s), 1)])
        phis[1] = phis[1] + AltForm.from_terms(dim, 2, [((p, r), 1), ((q, s), -1)])
        phis[2] = phis[2] + AltForm.from_terms(dim, 2, [((p, s), -1), ((q, r), -1)])
    return phis


def _cyclic(i: int):
    return (i + 1) % 3, (i + 2) % 3


def _threead_forms(xis: List[AltForm], phis_h: List[AltForm], alpha, gamma):
    """Φ_i = Φ_i^H − ξ_j∧ξ_k and τ^γ = α Σ ξ_i∧Φ_i^H + (γ/2) ξ_123."""
    phis = []
    for i in range(3):
        j, k = _cyclic(i)
        phis.append(phis_h[i] - wedge(xis[j], xis[k]))
    xi123 = wedge(wedge(xis[0], xis[1]), xis[2])
    mixed = AltForm.zero(xis[0].dim, 3)
    for i in range(3):
        mixed = mixed + wedge(xis[i], phis_h[i])
    tau = mixed * alpha + xi123 * (Fraction(gamma) / 2)
    return phis, mixed, xi123, tau


def build_3ad_tensors(n: int = 1, alpha=1, delta=1, gamma=None) -> ModelBundle:
    """Algebraic 3-(α, δ)-Sasaki tensors on R^{4n+3} with ξ_i = e_1, e_2, e_3."""
    n = int(n)
    if n < 1:
        raise MalformedInputError(f"n must be at least 1, got {n}")
    alpha, delta = _parse_rational(alpha, "alpha"), _parse_rational(delta, "delta")
    if alpha == 0:
        raise MalformedInputError("alpha must be nonzero")
    gamma = 2 * (delta - 4 * alpha) if gamma is None else _parse_rational(gamma, "gamma")
    dim = 4 * n + 3
    xis = [AltForm.basis(dim, i) for i in range(3)]
    phis_h = _quaternionic_phis(n, 3, dim)
    phis, mixed, xi123, tau = _threead_forms(xis, phis_h, alpha, gamma)
    bundle = ModelBundle(
        name="3ad-tensors",
        params={"n": n, "alpha": alpha, "delta": delta, "gamma": gamma},
        model=None,
        tau=tau,
        tensors={
            "xi": [la.eye(dim)[i] for i in range(3)],
            "Phi": phis,
            "PhiH": phis_h,
            "phi": mixed + xi123,
        },
        notes=["τ^γ = α Σ ξ_i∧Φ_i^H + (γ/2) ξ_123 with the determinant convention for ∧"],
    )
    return bundle


def threead_relation_residuals(bundle: ModelBundle) -> Dict[str, object]:
    """Residuals of Φ_i² = −Id + ξ_i⊗ξ_i, Φ_k = −Φ_iΦ_j + ξ_i⊗ξ_j and the horizontal relations."""
    g = bundle.gram
    dim = bundle.dim
    one = la.eye(dim, bundle.exact_mode)
    xis = bundle.tensors["xi"]
    phis = [form_endo(p, g) for p in bundle.tensors["Phi"]]
    phis_h = [form_endo(p, g) for p in bundle.tensors["PhiH"]]
    square = cross = horizontal = la.max_abs(la.zeros(1, bundle.exact_mode))
    for i in range(3):
        xi_flat = np.dot(g, xis[i])
        square = max(square, la.max_abs(np.dot(phis[i], phis[i]) + one - np.outer(xis[i], xi_flat)))
        j, k = _cyclic(i)
        # Φ_k X = −Φ_i Φ_j X + ⟨ξ_j, X⟩ ξ_i
        expected = -np.dot(phis[i], phis[j]) + np.outer(xis[i], np.dot(g, xis[j]))
        cross = max(cross, la.max_abs(phis[k] - expected))
        horizontal = max(horizontal, la.max_abs(np.dot(phis_h[i], phis_h[j]) + phis_h[k]),
                         la.max_abs(np.dot(phis_h[j], phis_h[i]) - phis_h[k]))
    return {"square": square, "cross": cross, "horizontal": horizontal}


def _so5_sphere_model(w_sq, c) -> ReductiveModel:
    e = lambda i, j: _e(5, i, j)  # noqa: E731
    a = [e(0, 1) + e(2, 3), e(0, 2) - e(1, 3), e(0, 3) + e(1, 2)]
    b = [e(0, 1) - e(2, 3), e(0, 2) + e(1, 3), e(0, 3) - e(1, 2)]
    horizontal = [e(k, 4) for k in range(4)]
    gram = la.zeros((7, 7))
    for i in range(3):
        gram[i, i] = w_sq
    for i in range(3, 7):
        gram[i, i] = c
    return ReductiveModel.from_matrices(b, a + horizontal, gram=gram, name="Spin(5)/Sp(1)")


def build_3ad_sphere(alpha=1, delta=5, gamma=None) -> ModelBundle:
    """Homogeneous 3-(α, δ)-Sasaki S^7 = Spin(5)/Sp(1), m = sp(1) ⊕ H with two scales.

    The vertical scale is |A_i|² = 1/δ² and the horizontal one 1/(4αδ), which
    gives dξ_i = 2αΦ_i + 2(α−δ)ξ_j∧ξ_k. γ defaults to the parallel value 2(δ − 4α).
    Both scales are positive exactly when αδ > 0, so α, δ < 0 is allowed.
    """
    alpha, delta = _parse_rational(alpha, "alpha"), _parse_rational(delta, "delta")
    if alpha == 0 or delta == 0 or alpha * delta < 0:
        raise MalformedInputError("alpha and delta must be nonzero with alpha*delta > 0 for a Riemannian metric")
    canonical_gamma = 2 * (delta - 4 * alpha)
    gamma = canonical_gamma if gamma is None else _parse_rational(gamma, "gamma")
    w = 1 / delta
    c = 1 / (4 * alpha * delta)
    model = _so5_sphere_model(w * w, c)
    g = model.gram
    xi_vectors = [model.unit(i) * delta for i in range(3)]
    xis = [lower(x, g) for x in xi_vectors]
    # Φ_i^H = −ad(A_i) on H
    phis_h_endo = []
    for i in range(3):
        m = la.zeros((7, 7))
        for j in range(3, 7):
            m[:, j] = -model.mm_m[i, j]
        phis_h_endo.append(m)
    phis_h = [endo_form(p, g) for p in phis_h_endo]
    phis, mixed, xi123, tau = _threead_forms(xis, phis_h, alpha, gamma)
    p_v = la.zeros((7, 7))
    for i in range(3):
        p_v[i, i] = Fraction(1)
    tau_vertical = xi123 * (gamma / 2)
    bundle = ModelBundle(
        name="3ad-sphere",
        params={"alpha": alpha, "delta": delta, "gamma": gamma, "canonical_gamma": canonical_gamma,
                "vertical_scale": w * w, "horizontal_scale": c,
                "nearly_parallel": delta == 5 * alpha, "tau0": 12 * alpha},
        model=model,
        tau=tau,
        tensors={
            "xi": xi_vectors,
            "Phi": phis,
            "PhiH": phis_h,
            "phi": mixed + xi123,
            "tau_vertical": tau_vertical,
            "p_v": p_v,
        },
        notes=["vertical scale 1/δ², horizontal scale 1/(4αδ)",
               "auxiliary connection ∇^τ − 6τ^V stored as the Nomizu map 'auxiliary'"],
    )
    if gamma == canonical_gamma:
        aux = bundle.lam_tau - NomizuMap(torsion_endos(model, tau_vertical)) * 6
        aux.name = "auxiliary"
        bundle.tensors["auxiliary"] = aux
    return bundle


# Sasaki Stiefel manifolds


def build_sasaki_stiefel(n: int = 3) -> ModelBundle:
    """SO(n+2)/SO(n) as a circle bundle over the Grassmannian of oriented 2-planes.

    m = R E_12 ⊕ {E_1a, E_2a}; the normal metric with Gram ¼ Id makes ξ = 2E_12
    a unit Sasaki Reeb vector with τ = ξ∧Φ and Φ = −ad(E_12) on H.
    """
    n = int(n)
    if n < 2:
        raise MalformedInputError(f"n must be at least 2, got {n}")
    size = n + 2
    e = lambda i, j: _e(size, i, j)  # noqa: E731
    h = [e(a, b) for a, b in combinations(range(2, size), 2)]
    m = [e(0, 1)] + [e(0, a) for a in range(2, size)] + [e(1, a) for a in range(2, size)]
    dm = len(m)
    model = ReductiveModel.from_matrices(h, m, gram=la.eye(dm) * Fraction(1, 4), name=f"SO({size})/SO({n})")
    g = model.gram
    xi = model.unit(0) * 2
    j0 = la.zeros((dm, dm))
    for j in range(1, dm):
        j0[:, j] = model.bracket_m(model.unit(0), model.unit(j))
    phi_endo = -j0
    phi = endo_form(phi_endo, g)
    # curvature of the base Grassmannian: −ad([y, y']_{so(2) ⊕ so(n)}) on H
    base = la.zeros((dm, dm, dm, dm))
    for i, j in combinations(range(1, dm), 2):
        value = -model.rho_of(model.mm_h[i, j]) - model.mm_m[i, j, 0] * j0
        base[i, j], base[j, i] = value, -value
    generators = [base[i, j] for i, j in combinations(range(1, dm), 2) if not la.is_zero(base[i, j])]
    return ModelBundle(
        name="stiefel",
        params={"n": n},
        model=model,
        tau=lower(xi, g) ^ phi,
        tensors={"xi": xi, "Phi": phi_endo, "omega": phi, "J": phi_endo,
                 "base_curvature": base, "base_holonomy": span_close(generators, dm, g)},
        notes=["metric ¼ Id on m (normal metric scaled so that ξ = 2E_12 is a unit vector)"],
    )


# three dimensional models


def build_dim3(t=1, scale=None, variant: str = "group") -> ModelBundle:
    """τ = t·vol on a 3-dimensional model.

    ``group``: SU(2) with [E_i, E_j] = s ε_ijk E_k on an orthonormal basis and
    h = 0; ∇^τ is flat for s = 2t (the default).
    ``sasaki``: (SU(2) x U(1))/U(1) with holonomy so(2) and a parallel Reeb
    vector ξ; there τ = −t·vol_g for t > 0, t ≠ ½.
    """
    t = _parse_rational(t, "t")
    if t == 0:
        raise MalformedInputError("t must be nonzero")
    ls = su2_basis()
    if variant == "group":
        s = 2 * t if scale is None else _parse_rational(scale, "scale")
        model = ReductiveModel.from_matrices([], [l * s for l in ls], gram=la.eye(3), name="SU(2)")
        return ModelBundle(
            name="dim3",
            params={"t": t, "scale": s, "variant": variant, "flat": s in (2 * t, -2 * t)},
            model=model,
            tau=AltForm.volume(3) * t,
            notes=["h = 0: the group SU(2) with a left invariant round metric of curvature s²/4"],
        )
    if variant != "sasaki":
        raise MalformedInputError(f"unknown dim3 variant {variant!r}, expected 'group' or 'sasaki'")
    if t < 0 or t == Fraction(1, 2):
        raise MalformedInputError("the sasaki variant needs t > 0 and t ≠ 1/2")
    beta = 1 / (4 * t * t) - 1
    zero2 = la.zeros((2, 2))
    lift = [_block_diag(l, zero2) for l in ls]
    central = _e(5, 3, 4)
    model = ReductiveModel.from_matrices(
        [lift[2] - central], [lift[0], lift[1], lift[2] + beta * central],
        gram=la.exact(np.diag([1, 1, 1]) + np.diag([0, 0, 1]) * beta), name="(SU(2)xU(1))/U(1)")
    xi = model.unit(2) * (2 * t)
    return ModelBundle(
        name="dim3",
        params={"t": t, "beta": beta, "variant": variant},
        model=model,
        tau=canonical_torsion(model),
        tensors={"xi": xi},
        notes=["Berger sphere: |ξ|² = 1 + β with β = 1/(4t²) − 1"],
    )


# registry


@dataclass(frozen=True)
class ModelSpec:
    builder: Callable[..., ModelBundle]
    params: Mapping[str, Callable[[str], object]]
    description: str


def _int(value: str) -> int:
    return int(value)


MODEL_BUILDERS: Dict[str, ModelSpec] = {
    "kxk": ModelSpec(build_kxk, {"t": Fraction}, "(K x K)/K family with parameter t"),
    "symmetric-su2": ModelSpec(build_symmetric_su2, {}, "the symmetric member t = 0"),
    "s6": ModelSpec(lambda: build_gray("s6"), {}, "G2/SU(3)"),
    "flag": ModelSpec(lambda: build_gray("flag"), {}, "SU(3)/T2"),
    "cp3": ModelSpec(lambda: build_gray("cp3"), {}, "SO(5)/U(2)"),
    "s3s3": ModelSpec(lambda: build_gray("s3s3"), {}, "SU(2)^3/SU(2)"),
    "berger": ModelSpec(build_berger, {}, "SO(5)/SO(3)irr"),
    "3ad-tensors": ModelSpec(build_3ad_tensors, {"n": _int, "alpha": Fraction, "delta": Fraction,
                                                 "gamma": Fraction}, "3-(α,δ)-Sasaki tensors on R^(4n+3)"),
    "3ad-sphere": ModelSpec(build_3ad_sphere, {"alpha": Fraction, "delta": Fraction, "gamma": Fraction},
                            "homogeneous 3-(α,δ)-Sasaki S^7"),
    "stiefel": ModelSpec(build_sasaki_stiefel, {"n": _int}, "SO(n+2)/SO(n)"),
    "dim3": ModelSpec(build_dim3, {"t": Fraction, "scale": Fraction, "variant": str}, "τ = t vol in dimension 3"),
    "product-vol3": ModelSpec(build_product_vol3, {}, "vol3 ⊕ vol3 on R^6"),
    "g2-form": ModelSpec(lambda: _form_bundle("g2-form", build_g2_form()), {}, "the G2 3-form"),
    "su3-form": ModelSpec(lambda: _form_bundle("su3-form", build_su3_form()), {}, "Re of a complex volume form"),
}


def parse_params(name: str, pairs) -> Dict[str, object]:
    """Parse ``k=v`` strings (or a mapping) against the parameters a model accepts."""
    spec = MODEL_BUILDERS.get(name)
    if spec is None:
        raise UnknownModelError(f"unknown model {name!r}")
    items = pairs.items() if isinstance(pairs, Mapping) else (_split_pair(p) for p in pairs or [])
    out = {}
    for key, raw in items:
        if key not in spec.params:
            accepted = ", ".join(spec.params) or "none"
            raise MalformedInputError(f"model {name} has no parameter {key!r} (accepted: {accepted})")
        try:
            out[key] = spec.params[key](raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedInputError(f"parameter {key}: cannot parse {raw!r}") from exc
    return out


def _split_pair(pair: str):
    if "=" not in pair:
        raise MalformedInputError(f"expected k=v, got {pair!r}")
    key, value = pair.split("=", 1)
    return key.strip(), value.strip()


def build(name: str, params=None) -> ModelBundle:
    spec = MODEL_BUILDERS.get(name)
    if spec is None:
        raise UnknownModelError(f"unknown model {name!r}, expected one of {', '.join(MODEL_BUILDERS)}")
    kwargs = parse_params(name, params or {})
    logger.debug("building model %s with %s", name, kwargs)
    return spec.builder(**kwargs)
