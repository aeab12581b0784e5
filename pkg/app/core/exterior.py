"""Pointwise exterior algebra on a Euclidean space with a rational inner product.

Forms are covariant: an :class:`AltForm` stores ``alpha(e_i1, ..., e_ik)`` for
strictly increasing, 0-based index tuples, so wedge and interior products never
touch the metric. Everything that converts between forms and vectors or
endomorphisms takes the Gram matrix of the basis (identity when omitted).
"""
from fractions import Fraction
from itertools import combinations, permutations
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from app.config import settings
from app.core import linalg as la
from app.core.errors import (
    DegenerateFormError,
    DegreeError,
    DimensionMismatchError,
    NotSkewError,
    ScalarModeError,
    UnsupportedMetricError,
)

Index = Tuple[int, ...]

EXACT = "exact"
FLOAT = "float"


def sort_sign(idx: Sequence[int]) -> Tuple[int, Optional[Index]]:
    """Sign of the sorting permutation, 0 when an index repeats."""
    if len(set(idx)) < len(idx):
        return 0, None
    inversions = sum(1 for a in range(len(idx)) for b in range(a + 1, len(idx)) if idx[a] > idx[b])
    return (-1 if inversions % 2 else 1), tuple(sorted(idx))


class EucSpace:
    """R^n with a symmetric positive definite Gram matrix on the basis e_1..e_n."""

    def __init__(self, n: int, gram=None):
        if n < 1:
            raise DimensionMismatchError(f"dimension must be positive, got {n}")
        self.n = n
        self.gram = la.eye(n) if gram is None else np.asarray(gram)
        if self.gram.shape != (n, n):
            raise DimensionMismatchError(f"gram of shape {self.gram.shape} on R^{n}")
        if not la.is_zero(self.gram - self.gram.T):
            raise NotSkewError("gram matrix is not symmetric")
        plus, _, _ = la.signature(self.gram)
        if plus != n:
            raise DegenerateFormError(f"gram matrix is not positive definite (signature {la.signature(self.gram)})")

    def inner(self, x, y):
        return np.dot(np.dot(x, self.gram), y)

    def as_float(self) -> "EucSpace":
        return EucSpace(self.n, la.as_float(self.gram))


def _gram(dim: int, gram) -> np.ndarray:
    return la.eye(dim) if gram is None else np.asarray(gram)


class AltForm:
    """Alternating k-form with sparse coefficients on increasing index tuples."""

    __slots__ = ("dim", "degree", "mode", "_coeffs")

    def __init__(self, dim: int, degree: int, coeffs: Optional[Mapping[Index, object]] = None,
                 mode: str = EXACT):
        if dim < 1:
            raise DimensionMismatchError(f"dimension must be positive, got {dim}")
        if degree < 0:
            raise DegreeError(f"negative degree {degree}")
        if mode not in (EXACT, FLOAT):
            raise ScalarModeError(f"unknown scalar mode {mode!r}")
        self.dim = dim
        self.degree = degree
        self.mode = mode
        self._coeffs: Dict[Index, object] = {}
        if degree > dim:
            return
        for key, value in (coeffs or {}).items():
            key = tuple(int(i) for i in key)
            if len(key) != degree or any(i < 0 or i >= dim for i in key):
                raise DimensionMismatchError(f"index {key} invalid for a {degree}-form on R^{dim}")
            sign, ordered = sort_sign(key)
            if sign == 0:
                continue
            value = Fraction(value) if mode == EXACT else float(value)
            total = self._coeffs.get(ordered, 0) + sign * value
            if total == 0:
                self._coeffs.pop(ordered, None)
            else:
                self._coeffs[ordered] = total

    # construction

    @classmethod
    def zero(cls, dim: int, degree: int, mode: str = EXACT) -> "AltForm":
        return cls(dim, degree, {}, mode)

    @classmethod
    def basis(cls, dim: int, *idx: int, mode: str = EXACT) -> "AltForm":
        return cls(dim, len(idx), {tuple(idx): 1}, mode)

    @classmethod
    def volume(cls, dim: int, mode: str = EXACT) -> "AltForm":
        return cls.basis(dim, *range(dim), mode=mode)

    @classmethod
    def from_terms(cls, dim: int, degree: int, terms: Iterable[Tuple[Sequence[int], object]],
                   mode: str = EXACT) -> "AltForm":
        out = cls.zero(dim, degree, mode)
        for idx, c in terms:
            out = out + cls(dim, degree, {tuple(idx): c}, mode)
        return out

    @classmethod
    def from_array(cls, arr, degree: int) -> "AltForm":
        a = np.asarray(arr)
        mode = EXACT if a.dtype == object else FLOAT
        dim = a.shape[0] if a.ndim else 1
        if degree == 0:
            return cls(dim, 0, {(): a.item()} if a.item() != 0 else {}, mode)
        return cls(dim, degree, {I: a[I] for I in combinations(range(dim), degree) if a[I] != 0}, mode)

    # access

    def items(self):
        return self._coeffs.items()

    def __getitem__(self, idx: Sequence[int]):
        sign, ordered = sort_sign(tuple(idx))
        zero = Fraction(0) if self.mode == EXACT else 0.0
        if sign == 0:
            return zero
        return sign * self._coeffs.get(ordered, zero)

    def __len__(self) -> int:
        return len(self._coeffs)

    def __repr__(self) -> str:
        if not self._coeffs:
            return f"AltForm(dim={self.dim}, degree={self.degree}, 0)"
        terms = " + ".join(f"{c}*e{''.join(str(i + 1) for i in k)}" for k, c in sorted(self._coeffs.items()))
        return f"AltForm(dim={self.dim}, degree={self.degree}, {terms})"

    # arithmetic

    def _check(self, other: "AltForm", same_degree: bool = True):
        if not isinstance(other, AltForm):
            raise TypeError(f"expected AltForm, got {type(other).__name__}")
        if other.dim != self.dim:
            raise DimensionMismatchError(f"forms on R^{self.dim} and R^{other.dim}")
        if other.mode != self.mode:
            raise ScalarModeError(f"mixed scalar modes {self.mode} and {other.mode}")
        if same_degree and other.degree != self.degree:
            raise DegreeError(f"degrees {self.degree} and {other.degree} differ")

    def __add__(self, other: "AltForm") -> "AltForm":
        self._check(other)
        merged = dict(self._coeffs)
        for k, c in other.items():
            merged[k] = merged.get(k, 0) + c
        return AltForm(self.dim, self.degree, merged, self.mode)

    def __neg__(self) -> "AltForm":
        return AltForm(self.dim, self.degree, {k: -c for k, c in self.items()}, self.mode)

    def __sub__(self, other: "AltForm") -> "AltForm":
        return self + (-other)

    def __mul__(self, scalar) -> "AltForm":
        if isinstance(scalar, AltForm):
            return wedge(self, scalar)
        return AltForm(self.dim, self.degree, {k: c * scalar for k, c in self.items()}, self.mode)

    __rmul__ = __mul__

    def __xor__(self, other: "AltForm") -> "AltForm":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AltForm):
            return NotImplemented
        if (self.dim, self.degree, self.mode) != (other.dim, other.degree, other.mode):
            return False
        return (self - other).is_zero()

    __hash__ = None

    def max_abs(self):
        if not self._coeffs:
            return Fraction(0) if self.mode == EXACT else 0.0
        return max(abs(c) for c in self._coeffs.values())

    def is_zero(self, tol: Optional[float] = None) -> bool:
        if self.mode == EXACT:
            return not self._coeffs
        return self.max_abs() <= (settings.TOL if tol is None else tol)

    def as_float(self) -> "AltForm":
        return AltForm(self.dim, self.degree, {k: float(c) for k, c in self.items()}, FLOAT)

    # dense views

    def to_array(self) -> np.ndarray:
        exact_mode = self.mode == EXACT
        if self.degree == 0:
            return np.array(self[()], dtype=object if exact_mode else float)
        arr = la.zeros((self.dim,) * self.degree, exact_mode)
        for key, c in self.items():
            for perm in permutations(range(self.degree)):
                sign, _ = sort_sign(perm)
                arr[tuple(key[p] for p in perm)] = sign * c
        return arr

    def pullback(self, m) -> "AltForm":
        """The form (X_1, ..., X_k) -> alpha(M X_1, ..., M X_k)."""
        arr = self.to_array()
        for _ in range(self.degree):
            arr = np.tensordot(arr, m, axes=([0], [0]))
        return AltForm.from_array(arr, self.degree) if self.degree else self

    def evaluate(self, *vectors) -> object:
        if len(vectors) != self.degree:
            raise DegreeError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        arr = self.to_array()
        for v in vectors:
            arr = np.tensordot(v, arr, axes=([0], [0]))
        return arr.item() if isinstance(arr, np.ndarray) else arr


def _same(alpha: AltForm, beta: AltForm):
    if alpha.dim != beta.dim:
        raise DimensionMismatchError(f"forms on R^{alpha.dim} and R^{beta.dim}")
    if alpha.mode != beta.mode:
        raise ScalarModeError(f"mixed scalar modes {alpha.mode} and {beta.mode}")


def _mode_of(arr) -> str:
    return EXACT if la.is_exact(arr) else FLOAT


def wedge(alpha: AltForm, beta: AltForm) -> AltForm:
    _same(alpha, beta)
    degree = alpha.degree + beta.degree
    if degree > alpha.dim:
        return AltForm.zero(alpha.dim, degree, alpha.mode)
    out: Dict[Index, object] = {}
    for i_key, a in alpha.items():
        for j_key, b in beta.items():
            sign, key = sort_sign(i_key + j_key)
            if sign:
                out[key] = out.get(key, 0) + sign * a * b
    return AltForm(alpha.dim, degree, out, alpha.mode)


def interior(x, alpha: AltForm) -> AltForm:
    """Contraction X ⌟ alpha; the contraction of a 0-form is the zero 0-form."""
    x = np.asarray(x)
    if x.shape != (alpha.dim,):
        raise DimensionMismatchError(f"vector of shape {x.shape} against a form on R^{alpha.dim}")
    if alpha.mode == EXACT and x.dtype.kind in "iu":
        x = la.exact(x)
    if _mode_of(x) != alpha.mode:
        raise ScalarModeError(f"vector is {_mode_of(x)}, form is {alpha.mode}")
    if alpha.degree == 0:
        return AltForm.zero(alpha.dim, 0, alpha.mode)
    out: Dict[Index, object] = {}
    for key, c in alpha.items():
        for pos, i in enumerate(key):
            if x[i] != 0:
                rest = key[:pos] + key[pos + 1:]
                out[rest] = out.get(rest, 0) + (-1) ** pos * x[i] * c
    return AltForm(alpha.dim, alpha.degree - 1, out, alpha.mode)


def lower(x, gram=None) -> AltForm:
    """The 1-form g(X, .)."""
    x = np.asarray(x)
    g = _gram(x.shape[0], gram)
    covector = np.dot(g, x)
    return AltForm(x.shape[0], 1, {(i,): covector[i] for i in range(x.shape[0]) if covector[i] != 0},
                   _mode_of(x))


def raise_form(alpha: AltForm, gram=None) -> np.ndarray:
    if alpha.degree != 1:
        raise DegreeError(f"only 1-forms raise to vectors, got degree {alpha.degree}")
    g = _gram(alpha.dim, gram)
    covector = la.like(g, [alpha[(i,)] for i in range(alpha.dim)])
    return np.dot(la.inverse(g), covector)


def form_endo(alpha: AltForm, gram=None) -> np.ndarray:
    """Skew endomorphism A with g(A X, Y) = alpha(X, Y)."""
    if alpha.degree != 2:
        raise DegreeError(f"form_endo needs a 2-form, got degree {alpha.degree}")
    g = _gram(alpha.dim, gram)
    mat = alpha.to_array()
    if alpha.mode == FLOAT:
        g = la.as_float(g)
    return -np.dot(la.inverse(g), mat)


def endo_form(a, gram=None) -> AltForm:
    """Inverse of :func:`form_endo`; rejects endomorphisms that are not g-skew."""
    a = np.asarray(a)
    n = a.shape[0]
    g = _gram(n, gram)
    mat = np.dot(a.T, g)
    if not la.is_zero(mat + mat.T):
        raise NotSkewError("endomorphism is not skew with respect to the metric")
    return AltForm(n, 2, {(i, j): mat[i, j] for i, j in combinations(range(n), 2) if mat[i, j] != 0},
                   _mode_of(a))


def wedge_endo(x, y, gram=None) -> np.ndarray:
    """(X∧Y)Z = g(X,Z)Y − g(Y,Z)X."""
    x = np.asarray(x)
    g = _gram(x.shape[0], gram)
    return np.outer(y, np.dot(g, x)) - np.outer(x, np.dot(g, y))


def is_skew(a, gram=None, tol: Optional[float] = None) -> bool:
    a = np.asarray(a)
    g = _gram(a.shape[0], gram)
    mat = np.dot(a.T, g)
    return la.is_zero(mat + mat.T, tol)


def derivation_action(a, alpha: AltForm, gram=None) -> AltForm:
    """Derivation extension A_*alpha = Σ A e_i ∧ (e_i ⌟ alpha) of an endomorphism."""
    a = np.asarray(a)
    if a.shape != (alpha.dim, alpha.dim):
        raise DimensionMismatchError(f"endomorphism of shape {a.shape} on a form over R^{alpha.dim}")
    if gram is not None and not la.is_zero(np.asarray(gram) - la.eye(alpha.dim, la.is_exact(gram))):
        g = np.asarray(gram)
        a = np.dot(np.dot(g, a), la.inverse(g))
    out: Dict[Index, object] = {}
    for key, c in alpha.items():
        for pos, l in enumerate(key):
            for j in np.flatnonzero(la.nonzero_mask(a[:, l], None if alpha.mode == EXACT else 0.0)):
                sign, new_key = sort_sign(key[:pos] + (int(j),) + key[pos + 1:])
                if sign:
                    out[new_key] = out.get(new_key, 0) + sign * c * a[j, l]
    return AltForm(alpha.dim, alpha.degree, out, alpha.mode)


def hodge_star(alpha: AltForm, gram=None) -> AltForm:
    """Hodge star for the standard metric and orientation e_1∧…∧e_n."""
    if gram is not None and not la.is_zero(np.asarray(gram) - la.eye(alpha.dim, la.is_exact(gram))):
        raise UnsupportedMetricError("hodge_star is defined for orthonormal bases only; pass gram=None or the identity")
    full = tuple(range(alpha.dim))
    out: Dict[Index, object] = {}
    for key, c in alpha.items():
        rest = tuple(i for i in full if i not in key)
        sign, _ = sort_sign(key + rest)
        out[rest] = sign * c
    return AltForm(alpha.dim, alpha.dim - alpha.degree, out, alpha.mode)


def form_inner(alpha: AltForm, beta: AltForm, gram=None):
    """Induced inner product on Λ^k, (1/k!) α_{i..} β^{i..}."""
    _same(alpha, beta)
    if alpha.degree != beta.degree:
        raise DegreeError("inner product of forms of different degree")
    g = _gram(alpha.dim, gram)
    if alpha.mode == FLOAT:
        g = la.as_float(g)
    g_inv = la.inverse(g)
    raised = alpha.to_array()
    for _ in range(alpha.degree):
        raised = np.tensordot(raised, g_inv, axes=([0], [0]))
    total = np.sum(raised * beta.to_array())
    k_fact = 1
    for i in range(2, alpha.degree + 1):
        k_fact *= i
    return total / k_fact if alpha.mode == FLOAT else Fraction(total) / k_fact


def form_norm_sq(alpha: AltForm, gram=None):
    return form_inner(alpha, alpha, gram)


def endo_norm_sq(a, gram=None):
    """|A|² = Σ |A e_i|² over an orthonormal frame, i.e. tr(A* A)."""
    a = np.asarray(a)
    g = _gram(a.shape[0], gram)
    adjoint = np.dot(np.dot(la.inverse(g), a.T), g)
    return np.trace(np.dot(adjoint, a))


def torsion_norm_sq(tau: AltForm, gram=None):
    """‖τ‖² = Σ_i |e_i ⌟ τ|² over an orthonormal frame, three times the Λ³ norm."""
    return 3 * form_norm_sq(tau, gram)


def torsion_endo(tau: AltForm, x, gram=None) -> np.ndarray:
    """τ_X as a skew endomorphism."""
    return form_endo(interior(x, tau), gram)


def torsion_map(tau: AltForm, gram=None) -> np.ndarray:
    """Array t[x, y, :] holding the vector τ_{e_x} e_y."""
    g = _gram(tau.dim, gram)
    if tau.mode == FLOAT:
        g = la.as_float(g)
    return np.tensordot(tau.to_array(), la.inverse(g), axes=([2], [0]))


class CurvOperator:
    """Covariant 4-tensor R(X,Y,Z,W) = g(R(X,Y)Z, W) on R^n with its Gram matrix."""

    def __init__(self, arr, gram=None):
        self.arr = np.asarray(arr)
        self.dim = self.arr.shape[0]
        if self.arr.shape != (self.dim,) * 4:
            raise DimensionMismatchError(f"curvature tensor of shape {self.arr.shape}")
        self.gram = _gram(self.dim, gram)
        if not la.is_exact(self.arr):
            self.gram = la.as_float(self.gram)

    @property
    def mode(self) -> str:
        return _mode_of(self.arr)

    @classmethod
    def zero(cls, dim: int, gram=None, exact_mode: bool = True) -> "CurvOperator":
        return cls(la.zeros((dim,) * 4, exact_mode), gram)

    @classmethod
    def identity(cls, dim: int, gram=None) -> "CurvOperator":
        """R(X,Y) = X∧Y, the curvature tensor of constant curvature −1."""
        g = _gram(dim, gram)
        arr = la.zeros((dim,) * 4, la.is_exact(g))
        for x, y, z, w in np.ndindex(*(dim,) * 4):
            arr[x, y, z, w] = g[x, z] * g[y, w] - g[y, z] * g[x, w]
        return cls(arr, g)

    @classmethod
    def constant_curvature(cls, dim: int, c, gram=None) -> "CurvOperator":
        """Curvature tensor of constant sectional curvature c, R(X,Y) = −c X∧Y."""
        return cls.identity(dim, gram) * (-c)

    @classmethod
    def from_endos(cls, endos, gram=None) -> "CurvOperator":
        """From an array r[x, y] of endomorphisms R(e_x, e_y)."""
        r = np.asarray(endos)
        g = _gram(r.shape[0], gram)
        # g(R(x,y) e_z, e_w) = (R^T G)[z, w]
        arr = np.tensordot(np.swapaxes(r, 2, 3), g, axes=([3], [0]))
        return cls(arr, g)

    @classmethod
    def from_form4(cls, sigma: AltForm, gram=None) -> "CurvOperator":
        if sigma.degree != 4:
            raise DegreeError(f"expected a 4-form, got degree {sigma.degree}")
        return cls(sigma.to_array(), gram)

    @classmethod
    def sym_product(cls, alpha: AltForm, beta: AltForm, gram=None) -> "CurvOperator":
        """α⊗β + β⊗α as a curvature tensor."""
        a = alpha.to_array()
        b = beta.to_array()
        return cls(np.multiply.outer(a, b) + np.multiply.outer(b, a), gram)

    def __add__(self, other: "CurvOperator") -> "CurvOperator":
        return CurvOperator(self.arr + other.arr, self.gram)

    def __sub__(self, other: "CurvOperator") -> "CurvOperator":
        return CurvOperator(self.arr - other.arr, self.gram)

    def __mul__(self, scalar) -> "CurvOperator":
        return CurvOperator(self.arr * scalar, self.gram)

    __rmul__ = __mul__

    def __neg__(self) -> "CurvOperator":
        return CurvOperator(-self.arr, self.gram)

    def max_abs(self):
        return la.max_abs(self.arr)

    def is_zero(self, tol: Optional[float] = None) -> bool:
        return la.is_zero(self.arr, tol)

    def as_float(self) -> "CurvOperator":
        return CurvOperator(la.as_float(self.arr), la.as_float(self.gram))

    def slice(self, x, y) -> np.ndarray:
        return np.tensordot(y, np.tensordot(x, self.arr, axes=([0], [0])), axes=([0], [0]))

    def endo(self, x, y) -> np.ndarray:
        """R(X,Y) as an endomorphism."""
        return np.dot(la.inverse(self.gram), self.slice(x, y).T)

    def endos(self) -> np.ndarray:
        """Array r[x, y] of R(e_x, e_y)."""
        g_inv = la.inverse(self.gram)
        out = la.zeros((self.dim,) * 4, la.is_exact(self.arr))
        for x in range(self.dim):
            for y in range(self.dim):
                out[x, y] = np.dot(g_inv, self.arr[x, y].T)
        return out

    def value(self, x, y, z, w):
        return np.dot(z, np.dot(self.slice(x, y), w))

    def is_symmetric(self, tol: Optional[float] = None) -> bool:
        a = self.arr
        return (la.is_zero(a - a.transpose(2, 3, 0, 1), tol)
                and la.is_zero(a + a.transpose(1, 0, 2, 3), tol)
                and la.is_zero(a + a.transpose(0, 1, 3, 2), tol))

    def cyclic_sum(self) -> np.ndarray:
        a = self.arr
        return a + a.transpose(1, 2, 0, 3) + a.transpose(2, 0, 1, 3)

    def bianchi(self) -> AltForm:
        """b(R)(X,Y,Z,W), the cyclic sum over the first three arguments."""
        return AltForm.from_array(self.cyclic_sum(), 4) if self.dim >= 4 else \
            AltForm.zero(self.dim, 4, self.mode)

    def bianchi_residual(self):
        return la.max_abs(self.cyclic_sum())

    def ricci(self) -> np.ndarray:
        """Ric = Σ_{i<j} (e_i∧e_j)∘R(e_i,e_j) over an orthonormal frame, as an endomorphism."""
        g_inv = la.inverse(self.gram)
        # g(Ric X, W) = Σ_ij g^ij R(e_i, W, X, e_j)
        lowered = np.tensordot(self.arr, g_inv, axes=([0, 3], [0, 1])).T
        return np.dot(g_inv, lowered.T)

    def scal(self):
        return np.trace(self.ricci())

    def sectional(self, x, y):
        g = self.gram
        denom = np.dot(x, np.dot(g, x)) * np.dot(y, np.dot(g, y)) - np.dot(x, np.dot(g, y)) ** 2
        return self.value(x, y, y, x) / denom


def tau_squared(tau: AltForm, gram=None) -> CurvOperator:
    """τ²(X,Y,Z,W) = −g(τ_X Y, τ_Z W), i.e. τ²_{X,Y} Z = τ_Z τ_X Y."""
    if tau.degree != 3:
        raise DegreeError(f"tau_squared needs a 3-form, got degree {tau.degree}")
    g = _gram(tau.dim, gram)
    if tau.mode == FLOAT:
        g = la.as_float(g)
    t = tau.to_array()
    raised = np.tensordot(t, la.inverse(g), axes=([2], [0]))
    out = CurvOperator(-np.tensordot(raised, t, axes=([2], [2])), g)
    if not out.is_symmetric():
        raise NotSkewError("tau squared failed the pair symmetry check")
    return out
