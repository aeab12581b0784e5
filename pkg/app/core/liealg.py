"""Lie subalgebras of so(n, g) acting on R^n, and abstract Lie algebras by structure constants.

Splitting into irreducible summands works with the commutant: a summand is
irreducible exactly when its symmetric commutant is one-dimensional, and a
reducible summand is cut along the eigenspaces of a symmetric commutant
element. Eigenspaces are found from the rational factorization of the
characteristic polynomial, so a split is never guessed in exact mode.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import sympy

from app.config import settings
from app.core import linalg as la
from app.core.errors import (
    DegenerateFormError,
    DimensionMismatchError,
    IndeterminateSplitError,
    NotEquivariantError,
    NotInvariantError,
    NotSkewError,
    NotSubalgebraError,
)
from app.core.exterior import EXACT, AltForm, CurvOperator, derivation_action, endo_form, form_endo, is_skew, wedge

logger = logging.getLogger(__name__)


def bracket(a, b) -> np.ndarray:
    return np.dot(a, b) - np.dot(b, a)


def _matrix(a) -> np.ndarray:
    arr = np.asarray(a)
    if arr.dtype.kind in "iu":
        return la.exact(arr)
    return arr


def trace_form(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Gram matrix of −½ tr(AB), the Λ² inner product on skew endomorphisms of R^n."""
    k = len(mats)
    exact_mode = not mats or la.is_exact(mats[0])
    out = la.zeros((k, k), exact_mode)
    half = Fraction(1, 2) if exact_mode else 0.5
    for a in range(k):
        for b in range(a, k):
            out[a, b] = out[b, a] = -half * np.trace(np.dot(mats[a], mats[b]))
    return out


class LieSubalgebra:
    """A bracket-closed span of skew endomorphisms of R^n with Gram matrix ``gram``."""

    def __init__(self, n: int, basis: Sequence[np.ndarray], gram=None, check: bool = True):
        self.n = n
        self.basis: List[np.ndarray] = [_matrix(b) for b in basis]
        for b in self.basis:
            if b.shape != (n, n):
                raise DimensionMismatchError(f"endomorphism of shape {b.shape} in a subalgebra of so({n})")
        self.exact_mode = la.is_exact(self.basis[0]) if self.basis else (gram is None or la.is_exact(gram))
        g = la.eye(n, self.exact_mode) if gram is None else np.asarray(gram)
        self.gram = g if self.exact_mode else la.as_float(g)
        if check and self.basis and self.structure_constants is None:
            raise NotSubalgebraError(f"span of {len(self.basis)} endomorphisms is not bracket closed")

    @property
    def mode(self) -> str:
        return "exact" if self.exact_mode else "float"

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def __len__(self) -> int:
        return len(self.basis)

    def __repr__(self) -> str:
        return f"LieSubalgebra(n={self.n}, dim={self.dimension}, mode={self.mode})"

    @cached_property
    def matrix(self) -> np.ndarray:
        """Flattened basis as the columns of an n² x dim array."""
        return la.stack_columns([b.ravel() for b in self.basis], self.n * self.n, self.exact_mode)

    @cached_property
    def _left_inverse(self) -> np.ndarray:
        return la.left_inverse(self.matrix)

    def coordinates(self, a) -> Optional[np.ndarray]:
        if not self.basis:
            return la.zeros(0, self.exact_mode) if la.is_zero(a) else None
        flat = np.asarray(a).ravel()
        c = np.dot(self._left_inverse, flat)
        if not la.is_zero(flat - np.dot(self.matrix, c)):
            return None
        return c

    def contains(self, a) -> bool:
        return self.coordinates(a) is not None

    def is_subalgebra_of(self, other: "LieSubalgebra") -> bool:
        return all(other.contains(b) for b in self.basis)

    def element(self, coeffs) -> np.ndarray:
        out = la.zeros((self.n, self.n), self.exact_mode)
        for c, b in zip(coeffs, self.basis):
            if c != 0:
                out = out + c * b
        return out

    @cached_property
    def structure_constants(self) -> Optional[np.ndarray]:
        """c[i, j, k] with [b_i, b_j] = Σ_k c[i, j, k] b_k, or None if not closed."""
        k = self.dimension
        c = la.zeros((k, k, k), self.exact_mode)
        for i, j in combinations(range(k), 2):
            coords = self.coordinates(bracket(self.basis[i], self.basis[j]))
            if coords is None:
                return None
            c[i, j] = coords
            c[j, i] = -coords
        return c

    def closure_residual(self):
        worst = Fraction(0) if self.exact_mode else 0.0
        for i, j in combinations(range(self.dimension), 2):
            flat = bracket(self.basis[i], self.basis[j]).ravel()
            worst = max(worst, la.max_abs(flat - np.dot(self.matrix, np.dot(self._left_inverse, flat))))
        return worst

    def skew_residual(self):
        worst = Fraction(0) if self.exact_mode else 0.0
        for b in self.basis:
            m = np.dot(b.T, self.gram)
            worst = max(worst, la.max_abs(m + m.T))
        return worst

    def ad_matrices(self) -> List[np.ndarray]:
        return StructureAlgebra(self.structure_constants).ad_matrices() if self.basis else []

    def structure_algebra(self) -> "StructureAlgebra":
        return StructureAlgebra(self.structure_constants)

    def trace_form(self) -> np.ndarray:
        return trace_form(self.basis)

    def as_float(self) -> "LieSubalgebra":
        return LieSubalgebra(self.n, [la.as_float(b) for b in self.basis], la.as_float(self.gram), check=False)


def so_algebra(n: int, gram=None) -> LieSubalgebra:
    """so(n, g) with basis the endomorphisms of e_i∧e_j, i < j."""
    g = la.eye(n) if gram is None else np.asarray(gram)
    basis = [form_endo(AltForm.basis(n, i, j), g) for i, j in combinations(range(n), 2)]
    if not la.is_exact(g):
        basis = [la.as_float(b) for b in basis]
    return LieSubalgebra(n, basis, g, check=False)


def span_close(generators: Sequence[np.ndarray], n: Optional[int] = None, gram=None) -> LieSubalgebra:
    """Smallest bracket-closed subspace containing the generators."""
    gens = [_matrix(a) for a in generators]
    if not gens:
        if n is None:
            raise DimensionMismatchError("the dimension of an empty generator list must be given")
        return LieSubalgebra(n, [], gram)
    n = gens[0].shape[0]
    exact_mode = la.is_exact(gens[0])
    g = la.eye(n, exact_mode) if gram is None else np.asarray(gram)
    for a in gens:
        if a.shape != (n, n):
            raise DimensionMismatchError(f"generator of shape {a.shape} among {n}x{n} endomorphisms")
        if not is_skew(a, g):
            raise NotSkewError("generator is not skew with respect to the metric")
    span = la.IncrementalSpan(n * n, exact_mode)
    basis = [a for a in gens if span.add(a.ravel())]
    i = 0
    while i < len(basis):
        for j in range(i):
            c = bracket(basis[j], basis[i])
            if span.add(c.ravel()):
                basis.append(c)
        i += 1
    return LieSubalgebra(n, basis, g, check=False)


def stabilizer(tau: AltForm, gram=None) -> LieSubalgebra:
    """All A in so(n, g) with A_*τ = 0."""
    exact_mode = tau.mode == EXACT
    g = la.eye(tau.dim, exact_mode) if gram is None else np.asarray(gram)
    if not exact_mode:
        g = la.as_float(g)
    so = so_algebra(tau.dim, g)
    keys = list(combinations(range(tau.dim), tau.degree))
    system = la.zeros((len(keys), so.dimension), exact_mode)
    for col, a in enumerate(so.basis):
        image = derivation_action(a, tau, g)
        for key, c in image.items():
            system[keys.index(key), col] = c
    kernel = la.nullspace(system)
    basis = [so.element(kernel[:, c]) for c in range(kernel.shape[1])]
    out = LieSubalgebra(tau.dim, basis, g, check=False)
    if basis and out.structure_constants is None:
        raise NotSubalgebraError("stabilizer failed the bracket closure check")
    return out


def invariant_vectors(g: LieSubalgebra) -> np.ndarray:
    """Joint kernel of the basis endomorphisms, as columns."""
    return la.joint_kernel(g.basis, g.n, g.exact_mode)


def intersection(a: LieSubalgebra, b: LieSubalgebra) -> LieSubalgebra:
    if a.n != b.n:
        raise DimensionMismatchError(f"subalgebras of so({a.n}) and so({b.n})")
    if not a.basis or not b.basis:
        return LieSubalgebra(a.n, [], a.gram)
    kernel = la.nullspace(np.concatenate([a.matrix, -b.matrix], axis=1))
    basis = [a.element(kernel[:a.dimension, c]) for c in range(kernel.shape[1])]
    return LieSubalgebra(a.n, basis, a.gram, check=False)


def restrict(mats: Sequence[np.ndarray], gram, subspace) -> Tuple[List[np.ndarray], np.ndarray]:
    """Matrices of the action on an invariant subspace in its column basis, with its Gram matrix."""
    b = np.asarray(subspace)
    g = np.asarray(gram)
    small = np.dot(np.dot(b.T, g), b)
    lift = np.dot(la.inverse(small), np.dot(b.T, g))
    out = []
    for a in mats:
        image = np.dot(a, b)
        local = np.dot(lift, image)
        if not la.is_zero(image - np.dot(b, local)):
            raise NotInvariantError("subspace is not invariant under the action")
        out.append(local)
    return out, small


def _intertwiners(mats_a, mats_b, exact_mode: bool) -> np.ndarray:
    """Kernel of X ↦ B_i X − X A_i for maps X from the first space to the second."""
    da = mats_a[0].shape[0] if mats_a else 0
    db = mats_b[0].shape[0] if mats_b else 0
    blocks = [la.kron(bm, la.eye(da, exact_mode)) - la.kron(la.eye(db, exact_mode), am.T)
              for am, bm in zip(mats_a, mats_b)]
    return la.joint_kernel(blocks, da * db, exact_mode)


def equivalent(mats_a: Sequence[np.ndarray], mats_b: Sequence[np.ndarray]) -> bool:
    """Whether two irreducible actions of the same basis are equivalent (Schur)."""
    if not mats_a:
        return True
    if mats_a[0].shape != mats_b[0].shape:
        return False
    return _intertwiners(mats_a, mats_b, la.is_exact(mats_a[0])).shape[1] > 0


@dataclass
class Commutant:
    full_dim: int
    symmetric: List[np.ndarray]
    skew: List[np.ndarray]


def commutant_of(mats: Sequence[np.ndarray], n: int, gram=None) -> Commutant:
    exact_mode = la.is_exact(mats[0]) if mats else (gram is None or la.is_exact(gram))
    g = la.eye(n, exact_mode) if gram is None else np.asarray(gram)
    one = la.eye(n, exact_mode)
    blocks = [la.kron(one, b.T) - la.kron(b, one) for b in mats]
    full = la.joint_kernel(blocks, n * n, exact_mode)
    elements = [full[:, c].reshape(n, n) for c in range(full.shape[1])]

    def part(sign) -> List[np.ndarray]:
        if not elements:
            return []
        defect = la.stack_columns([(np.dot(g, s) - sign * np.dot(s.T, g)).ravel() for s in elements],
                                  n * n, exact_mode)
        kernel = la.nullspace(defect)
        return [sum((kernel[i, c] * elements[i] for i in range(len(elements)) if kernel[i, c] != 0),
                    la.zeros((n, n), exact_mode))
                for c in range(kernel.shape[1])]

    return Commutant(full_dim=len(elements), symmetric=part(1), skew=part(-1))


def commutant(g: LieSubalgebra) -> Commutant:
    """Commutant of the action of g on R^n, split into g-symmetric and g-skew parts."""
    return commutant_of(g.basis, g.n, g.gram)


@dataclass
class RepDecomposition:
    n: int
    gram: np.ndarray
    blocks: List[np.ndarray]
    commutant_dims: List[int]
    irreducible: List[bool]
    invariant: List[bool]
    isotypic: List[List[int]]
    seed: int

    @property
    def dims(self) -> List[int]:
        return [b.shape[1] for b in self.blocks]

    def projector(self, i: int) -> np.ndarray:
        return la.projector(self.blocks[i], self.gram)

    def isotypic_projectors(self) -> List[np.ndarray]:
        """Projectors onto the isotypic components in a seed-independent order."""
        projs = [sum((self.projector(i) for i in cls[1:]), self.projector(cls[0])) for cls in self.isotypic]
        return sorted(projs, key=lambda p: (int(round(float(np.trace(p)))), tuple(float(x) for x in p.flat)))


def _candidates(symmetric: List[np.ndarray], rng: np.random.Generator, exact_mode: bool):
    coeffs = rng.integers(-9, 10, size=len(symmetric))
    if np.any(coeffs):
        yield sum((Fraction(int(c)) * s if exact_mode else float(c) * s for c, s in zip(coeffs, symmetric)),
                  la.zeros(symmetric[0].shape, exact_mode))
    yield from symmetric


def _poly_at(coeffs: Sequence[Fraction], t: np.ndarray) -> np.ndarray:
    n = t.shape[0]
    out = la.zeros((n, n))
    for c in coeffs:
        out = np.dot(out, t) + c * la.eye(n)
    return out


def _eigen_split(t: np.ndarray, tol: Optional[float]) -> Optional[np.ndarray]:
    """A proper invariant subspace cut out by one eigenvalue group of a self-adjoint t, if any."""
    if la.is_exact(t):
        x = sympy.Symbol("x")
        entries = [sympy.Rational(Fraction(v).numerator, Fraction(v).denominator) for v in t.flat]
        poly = sympy.Matrix(t.shape[0], t.shape[1], entries).charpoly(x)
        _, factors = sympy.factor_list(poly.as_expr(), x)
        if len(factors) < 2:
            return None
        coeffs = [Fraction(int(c.p), int(c.q)) for c in sympy.Poly(factors[0][0], x).all_coeffs()]
        return la.nullspace(_poly_at(coeffs, t))
    tol = settings.TOL if tol is None else tol
    values = np.sort(np.linalg.eigvals(t).real)
    scale = max(1.0, float(np.max(np.abs(values))))
    gaps = np.flatnonzero(np.diff(values) > 1e3 * tol * scale)
    if gaps.size == 0:
        return None
    cluster = values[:gaps[0] + 1]
    kernel = la.nullspace(t - float(np.mean(cluster)) * np.eye(t.shape[0]), 1e3 * tol * scale)
    if kernel.shape[1] != cluster.size:
        raise IndeterminateSplitError(
            f"eigenvalue cluster of size {cluster.size} has a kernel of dimension {kernel.shape[1]}")
    return kernel


def _irreducible_blocks(mats, gram, basis, rng, tol) -> List[np.ndarray]:
    d = basis.shape[1]
    if d <= 1:
        return [basis]
    local, local_gram = restrict(mats, gram, basis)
    comm = commutant_of(local, d, local_gram)
    if len(comm.symmetric) <= 1:
        return [basis]
    for t in _candidates(comm.symmetric, rng, la.is_exact(basis)):
        sub = _eigen_split(t, tol)
        if sub is None or sub.shape[1] in (0, d):
            continue
        rest = la.orthogonal_complement(sub, local_gram)
        return (_irreducible_blocks(mats, gram, np.dot(basis, sub), rng, tol)
                + _irreducible_blocks(mats, gram, np.dot(basis, rest), rng, tol))
    raise IndeterminateSplitError(
        f"no symmetric commutant element splits a {d}-dimensional summand with "
        f"{len(comm.symmetric)} independent symmetric intertwiners")


def decompose_action(mats: Sequence[np.ndarray], n: int, gram=None, seed: Optional[int] = None,
                     tol: Optional[float] = None) -> RepDecomposition:
    """Orthogonal splitting of R^n into irreducible summands of the linear span of ``mats``."""
    mats = [_matrix(a) for a in mats]
    exact_mode = la.is_exact(mats[0]) if mats else (gram is None or la.is_exact(gram))
    g = la.eye(n, exact_mode) if gram is None else np.asarray(gram)
    if not exact_mode:
        g = la.as_float(g)
    for a in mats:
        if not is_skew(a, g, tol):
            raise NotSkewError("representation matrices must be skew for an orthogonal splitting")
    seed = settings.SEED if seed is None else seed
    rng = np.random.default_rng(seed)
    blocks = _irreducible_blocks(mats, g, la.eye(n, exact_mode), rng, tol)
    local = [restrict(mats, g, b) for b in blocks]
    comm_dims, irreducible = [], []
    for (lm, lg), b in zip(local, blocks):
        c = commutant_of(lm, b.shape[1], lg)
        comm_dims.append(c.full_dim)
        irreducible.append(len(c.symmetric) == 1)
    classes: List[List[int]] = []
    for i in range(len(blocks)):
        for cls in classes:
            j = cls[0]
            if blocks[j].shape[1] == blocks[i].shape[1] and equivalent(local[i][0], local[j][0]):
                cls.append(i)
                break
        else:
            classes.append([i])
    logger.debug("split R^%d into summands of dimensions %s", n, [b.shape[1] for b in blocks])
    return RepDecomposition(n=n, gram=g, blocks=blocks, commutant_dims=comm_dims, irreducible=irreducible,
                            invariant=[True] * len(blocks), isotypic=classes, seed=seed)


def decompose(g: LieSubalgebra, seed: Optional[int] = None, tol: Optional[float] = None) -> RepDecomposition:
    return decompose_action(g.basis, g.n, g.gram, seed, tol)


def casimir_so(n: int) -> np.ndarray:
    """Cas = −Σ_{i<j} (e_i∧e_j)², which acts as (n−1) Id."""
    out = la.zeros((n, n))
    for i, j in combinations(range(n), 2):
        e = form_endo(AltForm.basis(n, i, j))
        out = out - np.dot(e, e)
    return out


def casimir(g: LieSubalgebra, action: Optional[Sequence[np.ndarray]] = None, inner=None) -> np.ndarray:
    """Casimir −Σ B^{ab} ρ(X_a) ρ(X_b) for the invariant inner product ``inner`` on g.

    ``inner`` defaults to the trace form −½ tr(XY) of the defining matrices and
    ``action`` to the defining representation.
    """
    rho = g.basis if action is None else [_matrix(a) for a in action]
    if not g.basis:
        return la.zeros((g.n, g.n), g.exact_mode)
    b = g.trace_form() if inner is None else np.asarray(inner)
    try:
        b_inv = la.inverse(b)
    except DegenerateFormError:
        raise DegenerateFormError("invariant form on the algebra is degenerate")
    dim_v = rho[0].shape[0]
    out = la.zeros((dim_v, dim_v), g.exact_mode)
    for a in range(len(rho)):
        for c in range(len(rho)):
            if b_inv[a, c] != 0:
                out = out - b_inv[a, c] * np.dot(rho[a], rho[c])
    for r in rho:
        if not la.is_zero(bracket(out, r)):
            raise NotEquivariantError("Casimir does not commute with the representation")
    return out


@dataclass
class KillingReport:
    gram: np.ndarray
    signature: Tuple[int, int, int]

    @property
    def verdict(self) -> str:
        plus, zero, minus = self.signature
        if plus == zero == minus == 0:
            return "empty"
        if zero == plus == 0:
            return "negative definite"
        if zero == minus == 0:
            return "positive definite"
        if plus == minus == 0:
            return "zero"
        if zero:
            return "degenerate"
        return "indefinite"

    @property
    def negative_definite(self) -> bool:
        return self.verdict == "negative definite"


def killing(g) -> KillingReport:
    """B(X, Y) = tr(ad X ad Y) on the basis of a LieSubalgebra or StructureAlgebra."""
    ads = g.ad_matrices()
    k = len(ads)
    exact_mode = not ads or la.is_exact(ads[0])
    gram = la.zeros((k, k), exact_mode)
    for i in range(k):
        for j in range(i, k):
            gram[i, j] = gram[j, i] = np.trace(np.dot(ads[i], ads[j]))
    return KillingReport(gram=gram, signature=la.signature(gram))


def curvature_space_dim(h: LieSubalgebra) -> Tuple[int, List[CurvOperator]]:
    """K(h): the kernel of the Bianchi map on the symmetric products of h inside Sym²Λ²."""
    forms = [endo_form(b, h.gram) for b in h.basis]
    pairs = [(a, b) for a in range(len(forms)) for b in range(a, len(forms))]
    keys = list(combinations(range(h.n), 4))
    system = la.zeros((len(keys), len(pairs)), h.exact_mode)
    for col, (a, b) in enumerate(pairs):
        # b(α⊗β + β⊗α) = α∧β
        for key, c in wedge(forms[a], forms[b]).items():
            system[keys.index(key), col] = c
    kernel = la.nullspace(system) if keys else la.eye(len(pairs), h.exact_mode)
    basis = []
    for c in range(kernel.shape[1]):
        op = CurvOperator.zero(h.n, h.gram, h.exact_mode)
        for row, (a, b) in enumerate(pairs):
            if kernel[row, c] != 0:
                op = op + CurvOperator.sym_product(forms[a], forms[b], h.gram) * kernel[row, c]
        basis.append(op)
    return kernel.shape[1], basis


class StructureAlgebra:
    """Abstract Lie algebra with [e_i, e_j] = Σ_k c[i, j, k] e_k."""

    def __init__(self, constants):
        self.constants = np.asarray(constants)
        k = self.constants.shape[0]
        if self.constants.shape != (k, k, k):
            raise DimensionMismatchError(f"structure constants of shape {self.constants.shape}")
        self.exact_mode = la.is_exact(self.constants) if k else True

    @property
    def dimension(self) -> int:
        return self.constants.shape[0]

    def __repr__(self) -> str:
        return f"StructureAlgebra(dim={self.dimension})"

    def bracket(self, x, y) -> np.ndarray:
        return np.tensordot(np.tensordot(x, self.constants, axes=([0], [0])), y, axes=([0], [0]))

    def ad(self, x) -> np.ndarray:
        # ad(x)[k, j] = Σ_i x_i c[i, j, k]
        return np.tensordot(x, self.constants, axes=([0], [0])).T

    def ad_matrices(self) -> List[np.ndarray]:
        return [self.constants[i].T for i in range(self.dimension)]

    def antisymmetry_residual(self):
        return la.max_abs(self.constants + self.constants.transpose(1, 0, 2))

    def jacobi_residual(self):
        k = self.dimension
        unit = la.eye(k, self.exact_mode)
        worst = Fraction(0) if self.exact_mode else 0.0
        for i, j, l in combinations(range(k), 3):
            x, y, z = unit[i], unit[j], unit[l]
            total = (self.bracket(x, self.bracket(y, z)) + self.bracket(y, self.bracket(z, x))
                     + self.bracket(z, self.bracket(x, y)))
            worst = max(worst, la.max_abs(total))
        return worst

    def killing(self) -> KillingReport:
        return killing(self)

    def subalgebra(self, basis) -> "StructureAlgebra":
        """Structure constants of the subalgebra spanned by the columns of ``basis``."""
        b = np.asarray(basis)
        k = b.shape[1]
        left = la.left_inverse(b)
        c = la.zeros((k, k, k), self.exact_mode)
        for i in range(k):
            for j in range(k):
                image = self.bracket(b[:, i], b[:, j])
                coords = np.dot(left, image)
                if not la.is_zero(image - np.dot(b, coords)):
                    raise NotSubalgebraError("span is not closed under the bracket")
                c[i, j] = coords
        return StructureAlgebra(c)

    def ideals(self, seed: Optional[int] = None) -> List[np.ndarray]:
        """Irreducible summands of the adjoint representation, orthogonal for −B.

        For compact semisimple algebras these are the simple ideals.
        """
        report = self.killing()
        if not report.negative_definite:
            raise DegenerateFormError(f"Killing form is {report.verdict}, not negative definite")
        return decompose_action(self.ad_matrices(), self.dimension, -report.gram, seed).blocks

    def is_simple(self, seed: Optional[int] = None) -> bool:
        """Nondegenerate Killing form and irreducible adjoint action.

        Irreducibility is read off the symmetric commutant, which needs an
        invariant inner product, so only compact algebras can pass.
        """
        if self.dimension == 0:
            return False
        report = self.killing()
        if not report.negative_definite:
            return False
        return len(commutant_of(self.ad_matrices(), self.dimension, -report.gram).symmetric) == 1
