"""Reductive homogeneous models g = h ⊕ m and their invariant connections.

A connection is given by its Nomizu map Λ: m → End(m). For an invariant
tensor S at the origin, ∇_X S is the action of Λ(X) on S, so Λ = 0 makes every
invariant tensor parallel.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from app.config import settings
from app.core import linalg as la
from app.core.errors import (
    DimensionMismatchError,
    NotAmbroseSingerError,
    NotEquivariantError,
    NotInvariantError,
    NotReductiveError,
    NotSkewError,
    NotSubalgebraError,
    ZeroTorsionSquareError,
)
from app.core.exterior import (
    AltForm,
    CurvOperator,
    form_endo,
    interior,
    tau_squared,
    torsion_norm_sq,
)
from app.core.liealg import LieSubalgebra, StructureAlgebra, bracket, killing, span_close, trace_form

logger = logging.getLogger(__name__)

Tensor = Union[np.ndarray, AltForm, CurvOperator]


def _zero(exact_mode: bool):
    return Fraction(0) if exact_mode else 0.0


class ReductiveModel:
    """Bracket tables of a reductive pair on bases A_a of h and X_i of m.

    ``hh[a, b, c]``: [A_a, A_b] = Σ_c hh[a, b, c] A_c
    ``rho[a]``: matrix of ad(A_a) on m, [A_a, X_j] = Σ_k rho[a][k, j] X_k
    ``mm_h[i, j, a]`` and ``mm_m[i, j, k]``: the h and m parts of [X_i, X_j]
    """

    def __init__(self, hh, rho, mm_h, mm_m, gram, name: str = ""):
        self.hh = np.asarray(hh)
        self.rho = [np.asarray(r) for r in rho]
        self.mm_h = np.asarray(mm_h)
        self.mm_m = np.asarray(mm_m)
        self.gram = np.asarray(gram)
        self.name = name
        dh, dm = len(self.rho), self.gram.shape[0]
        if self.hh.shape != (dh, dh, dh) or self.mm_h.shape != (dm, dm, dh) or self.mm_m.shape != (dm, dm, dm):
            raise DimensionMismatchError(
                f"bracket tables do not fit dim h = {dh}, dim m = {dm}: "
                f"{self.hh.shape}, {self.mm_h.shape}, {self.mm_m.shape}")
        self.exact_mode = la.is_exact(self.gram)
        self.h_matrices: Optional[List[np.ndarray]] = None
        self.m_matrices: Optional[List[np.ndarray]] = None

    @property
    def dim_h(self) -> int:
        return len(self.rho)

    @property
    def dim_m(self) -> int:
        return self.gram.shape[0]

    def __repr__(self) -> str:
        return f"ReductiveModel({self.name or 'unnamed'}, dim h={self.dim_h}, dim m={self.dim_m})"

    @classmethod
    def from_matrices(cls, h_basis: Sequence[np.ndarray], m_basis: Sequence[np.ndarray], gram=None,
                      name: str = "") -> "ReductiveModel":
        """Bracket tables of a matrix realization; the default metric is −tr(XY) on m."""
        h = [np.asarray(a) for a in h_basis]
        m = [np.asarray(x) for x in m_basis]
        dh, dm = len(h), len(m)
        exact_mode = la.is_exact(m[0])
        size = m[0].shape[0]
        cols = la.stack_columns([b.ravel() for b in h + m], size * size, exact_mode)
        if la.rank(cols) != dh + dm:
            raise NotReductiveError("h and m bases are not jointly independent")
        left = la.left_inverse(cols)

        def split(a):
            flat = a.ravel()
            coords = np.dot(left, flat)
            if not la.is_zero(flat - np.dot(cols, coords)):
                raise NotSubalgebraError("h ⊕ m is not closed under the matrix bracket")
            return coords[:dh], coords[dh:]

        hh = la.zeros((dh, dh, dh), exact_mode)
        for a in range(dh):
            for b in range(dh):
                ch, cm = split(bracket(h[a], h[b]))
                if not la.is_zero(cm):
                    raise NotSubalgebraError("h is not a subalgebra")
                hh[a, b] = ch
        rho = []
        for a in range(dh):
            r = la.zeros((dm, dm), exact_mode)
            for j in range(dm):
                ch, cm = split(bracket(h[a], m[j]))
                if not la.is_zero(ch):
                    raise NotReductiveError("[h, m] is not contained in m")
                r[:, j] = cm
            rho.append(r)
        mm_h = la.zeros((dm, dm, dh), exact_mode)
        mm_m = la.zeros((dm, dm, dm), exact_mode)
        for i in range(dm):
            for j in range(i + 1, dm):
                ch, cm = split(bracket(m[i], m[j]))
                mm_h[i, j], mm_h[j, i] = ch, -ch
                mm_m[i, j], mm_m[j, i] = cm, -cm
        if gram is None:
            gram = 2 * trace_form(m)
        model = cls(hh, rho, mm_h, mm_m, gram, name)
        model.h_matrices, model.m_matrices = h, m
        return model

    @cached_property
    def algebra(self) -> StructureAlgebra:
        """Structure constants of g = h ⊕ m on the basis A_1..A_dh, X_1..X_dm."""
        dh, dm = self.dim_h, self.dim_m
        c = la.zeros((dh + dm,) * 3, self.exact_mode)
        c[:dh, :dh, :dh] = self.hh
        for a in range(dh):
            c[a, dh:, dh:] = self.rho[a].T
            c[dh:, a, dh:] = -self.rho[a].T
        c[dh:, dh:, :dh] = self.mm_h
        c[dh:, dh:, dh:] = self.mm_m
        return StructureAlgebra(c)

    def bracket_m(self, x, y) -> np.ndarray:
        return np.tensordot(np.tensordot(x, self.mm_m, axes=([0], [0])), y, axes=([0], [0]))

    def rho_of(self, coords) -> np.ndarray:
        out = la.zeros((self.dim_m, self.dim_m), self.exact_mode)
        for c, r in zip(coords, self.rho):
            if c != 0:
                out = out + c * r
        return out

    def unit(self, i: int) -> np.ndarray:
        v = la.zeros(self.dim_m, self.exact_mode)
        v[i] = Fraction(1) if self.exact_mode else 1.0
        return v

    def jacobi_residual(self):
        return self.algebra.jacobi_residual()

    def natural_reductivity_residual(self):
        """max |g([X,Y]_m, Z) + g(Y, [X,Z]_m)| over basis triples."""
        lowered = np.tensordot(self.mm_m, self.gram, axes=([2], [0]))  # [i, j, z] = g([X_i, X_j]_m, X_z)
        return la.max_abs(lowered + lowered.transpose(0, 2, 1))

    @property
    def is_naturally_reductive(self) -> bool:
        return la.is_zero(self.natural_reductivity_residual())

    @property
    def is_symmetric(self) -> bool:
        return la.is_zero(self.mm_m)

    def isotropy(self) -> LieSubalgebra:
        """The image ρ(h) ⊆ so(m)."""
        if not self.rho:
            return LieSubalgebra(self.dim_m, [], self.gram)
        return span_close(self.rho, self.dim_m, self.gram)

    def mm_h_image(self) -> List[np.ndarray]:
        """Independent endomorphisms spanning ρ([m, m]_h)."""
        span = la.IncrementalSpan(self.dim_m ** 2, self.exact_mode)
        out = []
        for i, j in combinations(range(self.dim_m), 2):
            a = self.rho_of(self.mm_h[i, j])
            if span.add(a.ravel()):
                out.append(a)
        return out

    def invariance_residual(self, tensor: Tensor):
        """max over h of |ρ(A) · S|."""
        return max((la.max_abs(_as_array(act(r, tensor, self.gram))) for r in self.rho),
                   default=_zero(self.exact_mode))

    def as_float(self) -> "ReductiveModel":
        return ReductiveModel(la.as_float(self.hh), [la.as_float(r) for r in self.rho], la.as_float(self.mm_h),
                              la.as_float(self.mm_m), la.as_float(self.gram), self.name)


def complement(g_basis: Sequence[np.ndarray], h_basis: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Basis of the complement of h in g orthogonal for the trace form."""
    g = [np.asarray(x) for x in g_basis]
    h = [np.asarray(a) for a in h_basis]
    if not h:
        return list(g)
    exact_mode = la.is_exact(g[0])
    pairing = la.zeros((len(h), len(g)), exact_mode)
    for a, ha in enumerate(h):
        for b, gb in enumerate(g):
            pairing[a, b] = np.trace(np.dot(ha, gb))
    kernel = la.nullspace(pairing)
    out = []
    for c in range(kernel.shape[1]):
        out.append(sum((kernel[i, c] * g[i] for i in range(len(g)) if kernel[i, c] != 0),
                       la.zeros(g[0].shape, exact_mode)))
    return out


def _as_array(t: Tensor) -> np.ndarray:
    if isinstance(t, AltForm):
        return t.to_array()
    if isinstance(t, CurvOperator):
        return t.arr
    return np.asarray(t)


def _covariant_action(a: np.ndarray, arr: np.ndarray) -> np.ndarray:
    """(A·T)(X_1, ..., X_k) = −Σ_s T(..., A X_s, ...)."""
    out = np.zeros_like(arr)
    for slot in range(arr.ndim):
        moved = np.tensordot(a, arr, axes=([0], [slot]))
        out = out - np.moveaxis(moved, 0, slot)
    return out


def act(a: np.ndarray, tensor: Tensor, gram=None) -> Tensor:
    """Action of an endomorphism on a vector, endomorphism, form or curvature tensor."""
    if isinstance(tensor, AltForm):
        if tensor.degree == 0:
            return tensor * 0
        return AltForm.from_array(_covariant_action(a, tensor.to_array()), tensor.degree)
    if isinstance(tensor, CurvOperator):
        return CurvOperator(_covariant_action(a, tensor.arr), tensor.gram)
    t = np.asarray(tensor)
    if t.ndim == 1:
        return np.dot(a, t)
    if t.ndim == 2:
        return bracket(a, t)
    raise DimensionMismatchError(f"cannot act on an array of rank {t.ndim}")


class NomizuMap:
    """Linear map Λ: m → End(m), stored as the endomorphisms Λ(X_i)."""

    def __init__(self, maps: Sequence[np.ndarray], name: str = ""):
        self.maps = [np.asarray(m) for m in maps]
        self.name = name
        dm = len(self.maps)
        for m in self.maps:
            if m.shape != (dm, dm):
                raise DimensionMismatchError(f"Nomizu map value of shape {m.shape} on a {dm}-dimensional m")

    @classmethod
    def zero(cls, dim_m: int, exact_mode: bool = True, name: str = "canonical") -> "NomizuMap":
        return cls([la.zeros((dim_m, dim_m), exact_mode) for _ in range(dim_m)], name)

    @property
    def dim(self) -> int:
        return len(self.maps)

    def __call__(self, x) -> np.ndarray:
        out = np.zeros_like(self.maps[0])
        for c, m in zip(x, self.maps):
            if c != 0:
                out = out + c * m
        return out

    def __add__(self, other: "NomizuMap") -> "NomizuMap":
        return NomizuMap([a + b for a, b in zip(self.maps, other.maps)], self.name)

    def __sub__(self, other: "NomizuMap") -> "NomizuMap":
        return NomizuMap([a - b for a, b in zip(self.maps, other.maps)], self.name)

    def __mul__(self, scalar) -> "NomizuMap":
        return NomizuMap([scalar * a for a in self.maps], self.name)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"NomizuMap({self.name or 'unnamed'}, dim m={self.dim})"

    def is_zero(self) -> bool:
        return all(la.is_zero(m) for m in self.maps)

    def equivariance_residual(self, model: ReductiveModel):
        """max |Λ([A, X]) − [ρ(A), Λ(X)]| over basis elements."""
        worst = _zero(model.exact_mode)
        for r in model.rho:
            for j in range(model.dim_m):
                lhs = self(r[:, j])
                worst = max(worst, la.max_abs(lhs - bracket(r, self.maps[j])))
        return worst

    def is_metric(self, gram) -> bool:
        g = np.asarray(gram)
        return all(la.is_zero(np.dot(m.T, g) + np.dot(g, m)) for m in self.maps)

    def as_float(self) -> "NomizuMap":
        return NomizuMap([la.as_float(m) for m in self.maps], self.name)


def canonical(model: ReductiveModel) -> NomizuMap:
    return NomizuMap.zero(model.dim_m, model.exact_mode)


def levi_civita(model: ReductiveModel) -> NomizuMap:
    """Λ^g(X)Y = ½[X,Y]_m + U(X,Y) with 2g(U(X,Y),Z) = g([Z,X]_m,Y) + g(X,[Z,Y]_m)."""
    dm = model.dim_m
    half = Fraction(1, 2) if model.exact_mode else 0.5
    g_inv = la.inverse(model.gram)
    # lowered[z, x, y] = g([X_z, X_x]_m, X_y)
    lowered = np.tensordot(model.mm_m, model.gram, axes=([2], [0]))
    maps = []
    for i in range(dm):
        m = la.zeros((dm, dm), model.exact_mode)
        for j in range(dm):
            u_low = half * (lowered[:, i, j] + lowered[:, j, i])
            m[:, j] = half * model.mm_m[i, j] + np.dot(g_inv, u_low)
        maps.append(m)
    return NomizuMap(maps, "levi-civita")


def torsion_endos(model: ReductiveModel, tau: AltForm) -> List[np.ndarray]:
    """τ_{X_i} as endomorphisms of m."""
    return [form_endo(interior(model.unit(i), tau), model.gram) for i in range(model.dim_m)]


def with_torsion(model: ReductiveModel, tau: AltForm, base: Optional[NomizuMap] = None) -> NomizuMap:
    """Λ^τ(X) = Λ^g(X) + τ_X, the Nomizu map of ∇^g + τ."""
    if tau.degree != 3 or tau.dim != model.dim_m:
        raise DimensionMismatchError(f"expected a 3-form on R^{model.dim_m}")
    lc = levi_civita(model) if base is None else base
    return NomizuMap([a + t for a, t in zip(lc.maps, torsion_endos(model, tau))], "torsion")


def canonical_torsion(model: ReductiveModel) -> AltForm:
    """τ(X,Y,Z) = −½ g([X,Y]_m, Z), half the torsion of the canonical connection."""
    if not model.is_naturally_reductive:
        raise NotSkewError("canonical torsion is skew only on naturally reductive models")
    half = Fraction(1, 2) if model.exact_mode else 0.5
    lowered = np.tensordot(model.mm_m, model.gram, axes=([2], [0]))
    return AltForm.from_array(-half * lowered, 3)


def _torsion_table(model: ReductiveModel, lam: NomizuMap) -> np.ndarray:
    dm = model.dim_m
    t = la.zeros((dm, dm, dm), model.exact_mode)
    for i in range(dm):
        for j in range(dm):
            t[i, j] = lam.maps[i][:, j] - lam.maps[j][:, i] - model.mm_m[i, j]
    return t


def _curvature_table(model: ReductiveModel, lam: NomizuMap) -> np.ndarray:
    dm = model.dim_m
    r = la.zeros((dm, dm, dm, dm), model.exact_mode)
    for i, j in combinations(range(dm), 2):
        value = (bracket(lam.maps[i], lam.maps[j]) - lam(model.mm_m[i, j])
                 - model.rho_of(model.mm_h[i, j]))
        r[i, j], r[j, i] = value, -value
    return r


def holonomy(model: ReductiveModel, lam: NomizuMap) -> LieSubalgebra:
    """Span of the curvature values closed under [Λ(X), ·] and brackets."""
    curv = _curvature_table(model, lam)
    return _holonomy_from(model, lam, curv)


def _holonomy_from(model: ReductiveModel, lam: NomizuMap, curv: np.ndarray) -> LieSubalgebra:
    dm = model.dim_m
    span = la.IncrementalSpan(dm * dm, model.exact_mode)
    basis = [curv[i, j] for i, j in combinations(range(dm), 2) if span.add(curv[i, j].ravel())]
    frontier = list(basis)
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > settings.MAX_HOLONOMY_ROUNDS:
            logger.warning("holonomy closure stopped after %d rounds at dimension %d", rounds - 1, len(basis))
            break
        fresh = []
        for a in frontier:
            for c in [bracket(m, a) for m in lam.maps] + [bracket(b, a) for b in list(basis)]:
                if span.add(c.ravel()):
                    basis.append(c)
                    fresh.append(c)
        frontier = fresh
    return LieSubalgebra(dm, basis, model.gram, check=False)


@dataclass
class ConnectionReport:
    torsion: np.ndarray
    curvature: np.ndarray
    gram: np.ndarray
    holonomy: Optional[LieSubalgebra]
    metric: bool
    torsion_form: Optional[AltForm] = None
    residuals: Dict[str, object] = field(default_factory=dict)

    @property
    def curvature_operator(self) -> CurvOperator:
        return CurvOperator.from_endos(self.curvature, self.gram)


def connection_report(model: ReductiveModel, lam: NomizuMap, with_holonomy: bool = True) -> ConnectionReport:
    """Torsion, curvature and holonomy of the invariant connection with Nomizu map Λ."""
    if lam.dim != model.dim_m:
        raise DimensionMismatchError(f"Nomizu map on a {lam.dim}-dimensional space, model has dim m = {model.dim_m}")
    residual = lam.equivariance_residual(model)
    if not la.vanishes(residual):
        raise NotEquivariantError(f"Nomizu map is not h-equivariant (residual {residual})")
    torsion = _torsion_table(model, lam)
    curv = _curvature_table(model, lam)
    lowered = np.tensordot(torsion, model.gram, axes=([2], [0]))
    form = None
    if (la.is_zero(lowered + lowered.transpose(1, 0, 2)) and la.is_zero(lowered + lowered.transpose(0, 2, 1))):
        form = AltForm.from_array(lowered, 3)
    report = ConnectionReport(
        torsion=torsion,
        curvature=curv,
        gram=model.gram,
        holonomy=_holonomy_from(model, lam, curv) if with_holonomy else None,
        metric=lam.is_metric(model.gram),
        torsion_form=form,
        residuals={"equivariance": residual},
    )
    return report


def covariant_derivative(model: ReductiveModel, lam: NomizuMap, tensor: Tensor, x) -> Tensor:
    """∇_X S for an invariant tensor S."""
    return act(lam(x), tensor, model.gram)


def parallel_residual(model: ReductiveModel, lam: NomizuMap, tensor: Tensor):
    """max over basis X of |Λ(X) · S|; S must be h-invariant."""
    invariance = model.invariance_residual(tensor)
    if not la.vanishes(invariance):
        raise NotInvariantError(f"tensor is not invariant under the isotropy (residual {invariance})")
    return max((la.max_abs(_as_array(act(m, tensor, model.gram))) for m in lam.maps),
               default=_zero(model.exact_mode))


def exterior_derivative_invariant(model: ReductiveModel, xi) -> AltForm:
    """dξ^♭(X, Y) = g(∇^g_X ξ, Y) − g(∇^g_Y ξ, X) for an invariant vector field ξ."""
    lc = levi_civita(model)
    dm = model.dim_m
    cov = np.array([np.dot(lc.maps[i], xi) for i in range(dm)])  # cov[i] = ∇_{X_i} ξ
    low = np.dot(cov, model.gram)  # low[i, j] = g(∇_{X_i} ξ, X_j)
    return AltForm.from_array(low - low.T, 2)


def _connection_tensor_residual(model: ReductiveModel, lam: NomizuMap, torsion, curv):
    """Largest entry of ∇T and ∇R for the connection itself."""
    dm = model.dim_m
    worst_t = worst_r = _zero(model.exact_mode)
    for x in range(dm):
        a = lam.maps[x]
        # (A·T)(Y,Z) = A T(Y,Z) − T(AY, Z) − T(Y, AZ)
        d_t = (np.tensordot(torsion, a, axes=([2], [1]))
               - np.tensordot(a, torsion, axes=([0], [0]))
               - np.moveaxis(np.tensordot(a, torsion, axes=([0], [1])), 0, 1))
        worst_t = max(worst_t, la.max_abs(d_t))
        d_r = la.zeros(curv.shape, model.exact_mode)
        for i in range(dm):
            for j in range(dm):
                d_r[i, j] = (bracket(a, curv[i, j])
                             - np.tensordot(a[:, i], curv[:, j], axes=([0], [0]))
                             - np.tensordot(a[:, j], curv[i, :], axes=([0], [0])))
        worst_r = max(worst_r, la.max_abs(d_r))
    return worst_t, worst_r


@dataclass
class TransvectionAlgebra:
    holonomy: LieSubalgebra
    algebra: StructureAlgebra
    dim_m: int

    @property
    def dimension(self) -> int:
        return self.algebra.dimension

    def jacobi_residual(self):
        return self.algebra.jacobi_residual()

    def killing(self):
        return killing(self.algebra)


def transvection(model: ReductiveModel, lam: NomizuMap) -> TransvectionAlgebra:
    """hol ⊕ m with [X, Y] = (−R(X,Y), −T(X,Y)) for an Ambrose-Singer connection."""
    report = connection_report(model, lam)
    d_t, d_r = _connection_tensor_residual(model, lam, report.torsion, report.curvature)
    worst = max(d_t, d_r)
    if not la.vanishes(worst):
        raise NotAmbroseSingerError(
            f"torsion and curvature are not parallel (|∇T| = {d_t}, |∇R| = {d_r})", residual=worst)
    hol = report.holonomy
    dh, dm = hol.dimension, model.dim_m
    c = la.zeros((dh + dm,) * 3, model.exact_mode)
    if dh:
        c[:dh, :dh, :dh] = hol.structure_constants
    for a in range(dh):
        c[a, dh:, dh:] = hol.basis[a].T
        c[dh:, a, dh:] = -hol.basis[a].T
    for i, j in combinations(range(dm), 2):
        r_coords = hol.coordinates(report.curvature[i, j]) if dh else la.zeros(0, model.exact_mode)
        if r_coords is None:
            raise NotSubalgebraError("curvature value outside the computed holonomy algebra")
        c[dh + i, dh + j, :dh], c[dh + j, dh + i, :dh] = -r_coords, r_coords
        c[dh + i, dh + j, dh:], c[dh + j, dh + i, dh:] = -report.torsion[i, j], report.torsion[i, j]
    return TransvectionAlgebra(holonomy=hol, algebra=StructureAlgebra(c), dim_m=dm)


@dataclass
class RiemannReport:
    curvature: CurvOperator
    ricci: np.ndarray
    scal: object
    torsion_curvature: CurvOperator
    residuals: Dict[str, object] = field(default_factory=dict)


def curvature_difference(tau: AltForm, gram=None) -> CurvOperator:
    """τ² + b(τ²), the correction R^g − R^τ for parallel τ."""
    sq = tau_squared(tau, gram)
    return CurvOperator(sq.arr + sq.cyclic_sum(), sq.gram)


def bracket_difference(model: ReductiveModel, tau: AltForm) -> CurvOperator:
    """[τ_X, τ_Y] − 2τ_{τ_X Y} as a curvature tensor."""
    dm = model.dim_m
    endos = torsion_endos(model, tau)
    g_inv = la.inverse(model.gram)
    low = tau.to_array()
    r = la.zeros((dm, dm, dm, dm), model.exact_mode)
    for i, j in combinations(range(dm), 2):
        tau_xy = np.dot(g_inv, low[i, j])
        value = bracket(endos[i], endos[j]) - 2 * sum(
            (tau_xy[k] * endos[k] for k in range(dm) if tau_xy[k] != 0), la.zeros((dm, dm), model.exact_mode))
        r[i, j], r[j, i] = value, -value
    return CurvOperator.from_endos(r, model.gram)


def riemann_from_tau(model: ReductiveModel, tau: AltForm, lam_tau: Optional[NomizuMap] = None) -> RiemannReport:
    """R^g from R^τ via the torsion correction, cross-checked against the Levi-Civita map."""
    lam_tau = with_torsion(model, tau) if lam_tau is None else lam_tau
    r_tau = connection_report(model, lam_tau, with_holonomy=False).curvature_operator
    r_g = r_tau + curvature_difference(tau, model.gram)
    direct = connection_report(model, levi_civita(model), with_holonomy=False).curvature_operator
    brackets = r_tau + bracket_difference(model, tau)
    ric = r_g.ricci()
    return RiemannReport(
        curvature=r_g,
        ricci=ric,
        scal=np.trace(ric),
        torsion_curvature=r_tau,
        residuals={
            "levi_civita": (r_g - direct).max_abs(),
            "bracket_form": (r_g - brackets).max_abs(),
            "bianchi": r_g.bianchi_residual(),
        },
    )


def einstein_constant(ricci: np.ndarray):
    return np.trace(ricci) / ricci.shape[0]


def einstein_residual(ricci: np.ndarray):
    """max |Ric − (scal/n) Id|."""
    n = ricci.shape[0]
    return la.max_abs(ricci - einstein_constant(ricci) * la.eye(n, la.is_exact(ricci)))


@dataclass
class KappaFit:
    kappa: object
    residual: object
    scal_residual: Optional[object] = None


def fit_kappa(model: ReductiveModel, lam_tau: NomizuMap, tau: AltForm) -> KappaFit:
    """Least squares fit of R^τ = κ τ²; the scalar curvature identity is checked when the fit is exact."""
    sq = tau_squared(tau, model.gram)
    if sq.is_zero():
        raise ZeroTorsionSquareError("τ² vanishes, κ is undetermined")
    r_tau = connection_report(model, lam_tau, with_holonomy=False).curvature_operator
    column = sq.arr.reshape(-1, 1)
    coeffs, residual = la.least_squares(column, r_tau.arr.reshape(-1))
    kappa = coeffs[0]
    fit = KappaFit(kappa=kappa, residual=residual)
    if la.vanishes(residual):
        scal_g = riemann_from_tau(model, tau, lam_tau).scal
        fit.scal_residual = abs(scal_g - 2 * (1 + kappa) * torsion_norm_sq(tau, model.gram))
    return fit
