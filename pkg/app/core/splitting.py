"""Canonical g-splittings R^n = H ⊕ V and the identities they carry.

A g-irreducible summand is horizontal when some nonzero element of g lives
on it alone; all other summands, in particular every summand with an
equivalent partner, are vertical.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.core import linalg as la
from app.core.errors import DimensionMismatchError, NotInvariantError, NotSubalgebraError
from app.core.exterior import AltForm, CurvOperator, derivation_action, torsion_endo, torsion_map
from app.core.liealg import LieSubalgebra, RepDecomposition, bracket, decompose
from app.core.reductive import ConnectionReport, ReductiveModel, _covariant_action

logger = logging.getLogger(__name__)


def _zero(exact_mode: bool):
    return Fraction(0) if exact_mode else 0.0


def _contract(arr: np.ndarray, *maps: Optional[np.ndarray]) -> np.ndarray:
    """Precompose the slots of a covariant tensor with the given maps (None keeps a slot)."""
    out = arr
    for slot, m in enumerate(maps):
        if m is None:
            continue
        moved = np.tensordot(out, m, axes=([slot], [0]))
        out = np.moveaxis(moved, -1, slot)
    return out


def _supported_on(g: LieSubalgebra, block: np.ndarray) -> int:
    """dim so(block) ∩ g: elements of g that vanish on the orthogonal complement of the block."""
    rest = la.orthogonal_complement(block, g.gram)
    if rest.shape[1] == 0:
        return g.dimension
    columns = la.stack_columns([np.dot(b, rest).ravel() for b in g.basis], g.n * rest.shape[1], g.exact_mode)
    return la.nullspace(columns).shape[1] if g.basis else 0


@dataclass
class CanonicalSplitting:
    decomposition: RepDecomposition
    horizontal: List[bool]
    supported_dims: List[int]
    h_basis: np.ndarray
    v_basis: np.ndarray
    p_h: np.ndarray
    p_v: np.ndarray
    admissibility: object = None

    @property
    def gram(self) -> np.ndarray:
        return self.decomposition.gram

    @property
    def dim_h(self) -> int:
        return self.h_basis.shape[1]

    @property
    def dim_v(self) -> int:
        return self.v_basis.shape[1]

    @property
    def horizontal_blocks(self) -> List[np.ndarray]:
        return [b for b, flag in zip(self.decomposition.blocks, self.horizontal) if flag]

    @property
    def vertical_blocks(self) -> List[np.ndarray]:
        return [b for b, flag in zip(self.decomposition.blocks, self.horizontal) if not flag]

    @property
    def is_admissible(self) -> bool:
        return la.vanishes(self.admissibility)


def canonical_splitting(g: LieSubalgebra, tau: AltForm, seed: Optional[int] = None,
                        hol: Optional[LieSubalgebra] = None) -> CanonicalSplitting:
    """The canonical g-splitting for hol ⊆ g ⊆ stab(τ)."""
    if tau.dim != g.n:
        raise DimensionMismatchError(f"3-form on R^{tau.dim} against a subalgebra of so({g.n})")
    for b in g.basis:
        if not derivation_action(b, tau, g.gram).is_zero():
            raise NotInvariantError("g is not contained in the stabilizer of the torsion")
    if hol is not None and not hol.is_subalgebra_of(g):
        raise NotSubalgebraError("holonomy candidate is not contained in g")
    dec = decompose(g, seed)
    supported = [_supported_on(g, b) for b in dec.blocks]
    horizontal = [d > 0 for d in supported]
    # a summand with equivalent copies cannot carry a supported element of g
    for cls in dec.isotypic:
        if len(cls) > 1 and any(horizontal[i] for i in cls):
            logger.warning("isotypic class %s has a horizontal summand, moving it to V", cls)
            for i in cls:
                horizontal[i] = False
    h_cols = [b for b, flag in zip(dec.blocks, horizontal) if flag]
    v_cols = [b for b, flag in zip(dec.blocks, horizontal) if not flag]
    h_basis = np.concatenate(h_cols, axis=1) if h_cols else la.zeros((g.n, 0), g.exact_mode)
    v_basis = np.concatenate(v_cols, axis=1) if v_cols else la.zeros((g.n, 0), g.exact_mode)
    p_h = la.projector(h_basis, dec.gram)
    splitting = CanonicalSplitting(
        decomposition=dec,
        horizontal=horizontal,
        supported_dims=supported,
        h_basis=h_basis,
        v_basis=v_basis,
        p_h=p_h,
        p_v=la.eye(g.n, g.exact_mode) - p_h,
    )
    splitting.admissibility = admissibility_residual(tau, splitting)
    if not splitting.is_admissible:
        logger.warning("canonical splitting is not admissible, residual %s", splitting.admissibility)
    logger.debug("canonical splitting: dim H = %d, dim V = %d", splitting.dim_h, splitting.dim_v)
    return splitting


@dataclass
class TorsionSplit:
    horizontal: AltForm
    mixed: AltForm
    vertical: AltForm
    forbidden: AltForm

    @property
    def oneill(self) -> AltForm:
        """The O'Neill integrability tensor A = −τ^m."""
        return -self.mixed

    @property
    def admissible(self) -> bool:
        return self.forbidden.is_zero()

    def total(self) -> AltForm:
        return self.horizontal + self.mixed + self.vertical + self.forbidden


def torsion_split(s: CanonicalSplitting, tau: AltForm) -> TorsionSplit:
    """τ = τ^H + τ^m + τ^V + τ^{VVH} by the number of vertical arguments."""
    p_h, p_v = s.p_h, s.p_v
    if tau.mode != "exact":
        p_h, p_v = la.as_float(p_h), la.as_float(p_v)
    half = Fraction(1, 2) if tau.mode == "exact" else 0.5
    horizontal = tau.pullback(p_h)
    vertical = tau.pullback(p_v)
    # pulling back by P_H − P_V flips the sign of the parts with an odd number of vertical slots
    flipped = tau.pullback(p_h - p_v)
    even = (tau + flipped) * half
    odd = (tau - flipped) * half
    return TorsionSplit(horizontal=horizontal, mixed=odd - vertical, vertical=vertical,
                        forbidden=even - horizontal)


def admissibility_residual(tau: AltForm, s: CanonicalSplitting):
    return torsion_split(s, tau).forbidden.max_abs()


@dataclass
class SpecialTypeVerdict:
    trivial_on_v: bool
    horizontal_vanishes: bool
    decomposable: bool
    dim_v: int

    @property
    def applicable(self) -> bool:
        return self.trivial_on_v and self.dim_v > 0 and not self.decomposable

    @property
    def consistent(self) -> bool:
        """The special-type implication: trivial nonzero V-action and indecomposable force τ^H = 0."""
        return not self.applicable or self.horizontal_vanishes


def special_type_check(s: CanonicalSplitting, tau: AltForm, g: LieSubalgebra,
                       seed: Optional[int] = None) -> SpecialTypeVerdict:
    trivial = all(la.is_zero(np.dot(b, s.v_basis)) for b in g.basis) if s.dim_v else True
    verdict = SpecialTypeVerdict(
        trivial_on_v=trivial,
        horizontal_vanishes=torsion_split(s, tau).horizontal.is_zero(),
        decomposable=decomposability_search(g, tau, seed).decomposable,
        dim_v=s.dim_v,
    )
    if not verdict.consistent:
        logger.info("special type violated: g trivial on V but τ^H ≠ 0")
    return verdict


@dataclass
class DecomposabilityVerdict:
    decomposable: bool
    witness: Optional[Tuple[np.ndarray, np.ndarray]] = None
    partitions_searched: int = 0

    @property
    def summary(self) -> str:
        if self.decomposable:
            a, b = self.witness
            return f"decomposable as {a.shape[1]} + {b.shape[1]}"
        return "indecomposable under isotypic partitions"


def decomposability_search(g: LieSubalgebra, tau: AltForm, seed: Optional[int] = None) -> DecomposabilityVerdict:
    """Look for an orthogonal g-invariant T1 ⊕ T2 with τ ∈ Λ³T1 ⊕ Λ³T2, grouping whole isotypic classes."""
    dec = decompose(g, seed)
    classes = dec.isotypic
    searched = 0
    # the first class always sits in T1, so every bipartition is visited once
    for choice in product((True, False), repeat=len(classes) - 1):
        sides = (True,) + choice
        if all(sides):
            continue
        searched += 1
        first = [dec.blocks[i] for cls, side in zip(classes, sides) if side for i in cls]
        second = [dec.blocks[i] for cls, side in zip(classes, sides) if not side for i in cls]
        t1 = np.concatenate(first, axis=1)
        t2 = np.concatenate(second, axis=1)
        p1 = la.projector(t1, dec.gram)
        p2 = la.eye(g.n, g.exact_mode) - p1
        if tau.mode != "exact":
            p1, p2 = la.as_float(p1), la.as_float(p2)
        if (tau - tau.pullback(p1) - tau.pullback(p2)).is_zero():
            return DecomposabilityVerdict(True, (t1, t2), searched)
    return DecomposabilityVerdict(False, None, searched)


def _curvature_value(curv: np.ndarray, x, y, z) -> np.ndarray:
    """R(X, Y)Z from an array of endomorphisms R(e_i, e_j)."""
    endo = np.tensordot(np.tensordot(x, curv, axes=([0], [0])), y, axes=([0], [0]))
    return np.dot(endo, z)


def _columns(basis: np.ndarray) -> List[np.ndarray]:
    return [basis[:, c] for c in range(basis.shape[1])]


def mixed_curvature_residual(curv: np.ndarray, s: CanonicalSplitting):
    """max |R(X, V)| for X horizontal and V vertical."""
    worst = _zero(la.is_exact(curv))
    for x in _columns(la.like(curv, s.h_basis)):
        for v in _columns(la.like(curv, s.v_basis)):
            endo = np.tensordot(np.tensordot(x, curv, axes=([0], [0])), v, axes=([0], [0]))
            worst = max(worst, la.max_abs(endo))
    return worst


def horizontal_vertical_residual(curv: np.ndarray, tau: AltForm, s: CanonicalSplitting,
                                 bracket_coeff=-4, tau_coeff=4):
    """max |R(X,Y)V − a[τ_X, τ_Y]V − b τ_{τ_X Y}V| over X, Y horizontal and V vertical."""
    gram = s.gram if tau.mode == "exact" else la.as_float(s.gram)
    t = torsion_map(tau, gram)
    worst = _zero(tau.mode == "exact")
    hs, vs = _columns(s.h_basis), _columns(s.v_basis)
    if tau.mode != "exact":
        hs, vs = [la.as_float(x) for x in hs], [la.as_float(v) for v in vs]
    for i, x in enumerate(hs):
        tx = torsion_endo(tau, x, gram)
        for y in hs[i + 1:]:
            ty = torsion_endo(tau, y, gram)
            txy = np.tensordot(np.tensordot(x, t, axes=([0], [0])), y, axes=([0], [0]))
            t_txy = torsion_endo(tau, txy, gram)
            for v in vs:
                expected = bracket_coeff * np.dot(bracket(tx, ty), v) + tau_coeff * np.dot(t_txy, v)
                worst = max(worst, la.max_abs(_curvature_value(curv, x, y, v) - expected))
    return worst


@dataclass
class VerticalFit:
    constant: Optional[object]
    residual: object


def vertical_constant(curv: np.ndarray, tau: AltForm, s: CanonicalSplitting) -> VerticalFit:
    """Least squares c in R(U,V)W = c τ_{τ_U V}W over vertical U, V, W."""
    gram = s.gram if tau.mode == "exact" else la.as_float(s.gram)
    exact_mode = tau.mode == "exact"
    vs = _columns(s.v_basis)
    if not exact_mode:
        vs = [la.as_float(v) for v in vs]
    t = torsion_map(tau, gram)
    lhs, rhs = [], []
    for u in vs:
        for v in vs:
            tuv = np.tensordot(np.tensordot(u, t, axes=([0], [0])), v, axes=([0], [0]))
            t_tuv = torsion_endo(tau, tuv, gram)
            for w in vs:
                lhs.append(_curvature_value(curv, u, v, w))
                rhs.append(np.dot(t_tuv, w))
    if not rhs or all(la.is_zero(r) for r in rhs):
        worst = max((la.max_abs(x) for x in lhs), default=_zero(exact_mode))
        return VerticalFit(constant=None, residual=worst)
    target = np.concatenate(lhs)
    column = np.concatenate(rhs).reshape(-1, 1)
    coeffs, residual = la.least_squares(column, target)
    return VerticalFit(constant=coeffs[0], residual=residual)


def vertical_equivariance_residual(r: CurvOperator, g: LieSubalgebra, s: CanonicalSplitting):
    """max over g of |A · R(·,·,P_V ·,P_V ·)|, the g-invariance of the Λ²V part of R."""
    p_v = s.p_v if r.mode == "exact" else la.as_float(s.p_v)
    projected = _contract(r.arr, None, None, p_v, p_v)
    return max((la.max_abs(_covariant_action(b, projected)) for b in g.basis), default=_zero(r.mode == "exact"))


def s4_residual(tau: AltForm, s: CanonicalSplitting):
    """max over vertical V of |(τ_V)_* τ^H|."""
    gram = s.gram if tau.mode == "exact" else la.as_float(s.gram)
    horizontal = torsion_split(s, tau).horizontal
    worst = _zero(tau.mode == "exact")
    for v in _columns(s.v_basis):
        if tau.mode != "exact":
            v = la.as_float(v)
        worst = max(worst, derivation_action(torsion_endo(tau, v, gram), horizontal, gram).max_abs())
    return worst


def s3_refinement_residual(tau: AltForm, s: CanonicalSplitting, refinement: Optional[Sequence[np.ndarray]] = None):
    """Off-block parts of τ^H and τ^m for a refinement H = ⊕ H_α (the horizontal summands by default)."""
    blocks = list(s.horizontal_blocks if refinement is None else refinement)
    exact_mode = tau.mode == "exact"
    projs = [la.projector(b, s.gram) for b in blocks]
    p_v = s.p_v
    if not exact_mode:
        projs, p_v = [la.as_float(p) for p in projs], la.as_float(p_v)
    parts = torsion_split(s, tau)
    diag = AltForm.zero(tau.dim, 3, tau.mode)
    for p in projs:
        diag = diag + parts.horizontal.pullback(p)
    worst = (parts.horizontal - diag).max_abs()
    mixed = parts.mixed.to_array()
    for a, pa in enumerate(projs):
        for b, pb in enumerate(projs):
            if a != b:
                worst = max(worst, la.max_abs(_contract(mixed, pa, pb, p_v)))
    return worst


@dataclass
class SubmersionReport:
    mixed: object
    horizontal_vertical: object
    vertical: VerticalFit
    equivariance: Optional[object] = None
    extra: Dict[str, object] = field(default_factory=dict)


def submersion_identity_check(model: ReductiveModel, report: ConnectionReport, s: CanonicalSplitting,
                              tau: AltForm, g: Optional[LieSubalgebra] = None) -> SubmersionReport:
    """Curvature identities of the local submersion defined by an admissible splitting.

    ``report`` is the connection report of Λ^τ on ``model``; the splitting lives on m.
    """
    if s.decomposition.n != model.dim_m:
        raise DimensionMismatchError(f"splitting of R^{s.decomposition.n} on a model with dim m = {model.dim_m}")
    curv = report.curvature
    out = SubmersionReport(
        mixed=mixed_curvature_residual(curv, s),
        horizontal_vertical=horizontal_vertical_residual(curv, tau, s),
        vertical=vertical_constant(curv, tau, s),
    )
    if g is not None:
        out.equivariance = vertical_equivariance_residual(report.curvature_operator, g, s)
    return out
