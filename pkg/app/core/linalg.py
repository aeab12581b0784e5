"""Row reduction over the rationals (and floats) on numpy object arrays.

Exact arrays have ``dtype=object`` and hold :class:`fractions.Fraction`
entries; float arrays are ordinary ``float64``. Every routine here accepts
either kind and decides from the dtype whether comparisons are exact or
tolerance based.
"""
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from app.core.errors import DegenerateFormError, DimensionMismatchError

Scalar = Union[Fraction, float]

_fraction = np.frompyfunc(lambda x: x if isinstance(x, Fraction) else Fraction(x), 1, 1)


def exact(a) -> np.ndarray:
    """Copy ``a`` into an object array of Fractions."""
    arr = np.asarray(a, dtype=object)
    if arr.ndim == 0:
        return np.array(_fraction(arr.item()), dtype=object)
    if arr.size == 0:
        return np.zeros(arr.shape, dtype=object)
    return _fraction(arr).astype(object)


def as_float(a) -> np.ndarray:
    return np.asarray(a).astype(float)


def is_exact(a) -> bool:
    return np.asarray(a).dtype == object


def zeros(shape, exact_mode: bool = True) -> np.ndarray:
    if exact_mode:
        return np.full(shape, Fraction(0), dtype=object)
    return np.zeros(shape, dtype=float)


def eye(n: int, exact_mode: bool = True) -> np.ndarray:
    m = zeros((n, n), exact_mode)
    for i in range(n):
        m[i, i] = Fraction(1) if exact_mode else 1.0
    return m


def like(a, values) -> np.ndarray:
    """Convert ``values`` to the scalar mode of ``a``."""
    return exact(values) if is_exact(a) else as_float(values)


def resolve_tol(a, tol: Optional[float] = None) -> Optional[float]:
    """None for exact arrays, otherwise the given or configured tolerance."""
    if is_exact(a):
        return None
    return settings.TOL if tol is None else tol


def max_abs(a) -> Scalar:
    arr = np.asarray(a)
    if arr.size == 0:
        return Fraction(0) if arr.dtype == object else 0.0
    return max(abs(x) for x in arr.flat)


def is_zero(a, tol: Optional[float] = None) -> bool:
    tol = resolve_tol(a, tol)
    m = max_abs(a)
    return m == 0 if tol is None else m <= tol


def nonzero_mask(v, tol: Optional[float]) -> np.ndarray:
    if tol is None:
        return np.asarray(v != 0, dtype=bool)
    return np.abs(np.asarray(v, dtype=float)) > tol


def rref(m, tol: Optional[float] = None) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form and pivot columns."""
    src = np.asarray(m)
    exact_mode = src.dtype == object
    if exact_mode:
        work = exact(src)
        tol = None
    else:
        work = np.array(src, dtype=float)
        tol = settings.TOL if tol is None else tol
    if work.ndim != 2:
        raise DimensionMismatchError(f"rref expects a matrix, got shape {work.shape}")
    n_rows, n_cols = work.shape
    pivots: List[int] = []
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        column = work[piv_r:, piv_c]
        if exact_mode:
            nz = np.flatnonzero(column != 0)
            if nz.size == 0:
                continue
            i_row = piv_r + int(nz[0])
        else:
            mags = np.abs(column)
            i_rel = int(np.argmax(mags))
            if mags[i_rel] <= tol:
                work[piv_r:, piv_c] = 0.0
                continue
            i_row = piv_r + i_rel
        if i_row != piv_r:
            work[[piv_r, i_row]] = work[[i_row, piv_r]]
        work[piv_r, piv_c:] = work[piv_r, piv_c:] / work[piv_r, piv_c]
        for r in np.flatnonzero(nonzero_mask(work[:, piv_c], tol)):
            if r == piv_r:
                continue
            factor = work[r, piv_c]
            work[r, piv_c:] = work[r, piv_c:] - factor * work[piv_r, piv_c:]
        if not exact_mode:
            work[np.arange(n_rows) != piv_r, piv_c] = 0.0
        pivots.append(piv_c)
        piv_r += 1
    return work[:piv_r], pivots


def rank(m, tol: Optional[float] = None) -> int:
    arr = np.asarray(m)
    if arr.size == 0:
        return 0
    return len(rref(arr, tol)[1])


def nullspace(m, tol: Optional[float] = None) -> np.ndarray:
    """Kernel basis as the columns of an ``n_cols x k`` array."""
    arr = np.asarray(m)
    exact_mode = arr.dtype == object
    n_cols = arr.shape[1]
    if arr.shape[0] == 0:
        return eye(n_cols, exact_mode)
    reduced, pivots = rref(arr, tol)
    free_vars = [c for c in range(n_cols) if c not in set(pivots)]
    basis = zeros((n_cols, len(free_vars)), exact_mode)
    one = Fraction(1) if exact_mode else 1.0
    for k, f in enumerate(free_vars):
        basis[f, k] = one
        for i, p in enumerate(pivots):
            basis[p, k] = -reduced[i, f]
    return basis


def joint_kernel(blocks: Iterable[np.ndarray], dim: int, exact_mode: bool = True,
                 tol: Optional[float] = None) -> np.ndarray:
    """Common kernel of several linear maps, intersected one map at a time."""
    basis = None
    for block in blocks:
        if basis is not None and basis.shape[1] == 0:
            break
        restricted = np.asarray(block) if basis is None else np.dot(block, basis)
        if is_zero(restricted, tol):
            continue
        kernel = nullspace(restricted, tol)
        basis = kernel if basis is None else np.dot(basis, kernel)
    return eye(dim, exact_mode) if basis is None else basis


def solve(m, b, tol: Optional[float] = None) -> Optional[np.ndarray]:
    """One solution of ``m x = b`` or None when the system is inconsistent."""
    arr = np.asarray(m)
    exact_mode = arr.dtype == object
    rhs = np.asarray(b).reshape(-1, 1)
    n_cols = arr.shape[1]
    aug = np.concatenate([arr, rhs], axis=1)
    reduced, pivots = rref(aug, tol)
    if n_cols in pivots:
        return None
    sol = zeros(n_cols, exact_mode)
    for i, p in enumerate(pivots):
        sol[p] = reduced[i, n_cols]
    return sol


def inverse(m) -> np.ndarray:
    arr = np.asarray(m)
    n = arr.shape[0]
    exact_mode = arr.dtype == object
    aug = np.concatenate([arr, eye(n, exact_mode)], axis=1)
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise DegenerateFormError("matrix is singular")
    return reduced[:, n:]


def coordinates(basis, v, tol: Optional[float] = None) -> Optional[np.ndarray]:
    """Coefficients of ``v`` in the column basis, or None if ``v`` is outside the span."""
    return solve(basis, v, tol)


def stack_columns(vectors: Sequence[np.ndarray], dim: int, exact_mode: bool = True) -> np.ndarray:
    if not vectors:
        return zeros((dim, 0), exact_mode)
    return np.column_stack(list(vectors))


def orthogonal_complement(basis, gram) -> np.ndarray:
    """Columns spanning the gram-orthogonal complement of the column span."""
    b = np.asarray(basis)
    if b.shape[1] == 0:
        return eye(np.asarray(gram).shape[0], is_exact(gram))
    return nullspace(np.dot(b.T, gram))


def projector(basis, gram) -> np.ndarray:
    """Gram-orthogonal projector onto the column span: B (B^T G B)^-1 B^T G."""
    b = np.asarray(basis)
    n = np.asarray(gram).shape[0]
    if b.shape[1] == 0:
        return zeros((n, n), is_exact(gram))
    small = np.dot(np.dot(b.T, gram), b)
    return np.dot(np.dot(b, inverse(small)), np.dot(b.T, gram))


def least_squares(columns, target) -> Tuple[np.ndarray, Scalar]:
    """Normal-equation fit of ``target`` by the columns; returns (coefficients, max residual)."""
    a = np.asarray(columns)
    t = np.asarray(target).reshape(-1)
    normal = np.dot(a.T, a)
    rhs = np.dot(a.T, t)
    coeffs = solve(normal, rhs)
    if coeffs is None:
        raise DegenerateFormError("normal equations are inconsistent")
    return coeffs, max_abs(t - np.dot(a, coeffs))


def kron(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    out = zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), is_exact(a))
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0:
                out[i * b.shape[0]:(i + 1) * b.shape[0], j * b.shape[1]:(j + 1) * b.shape[1]] = a[i, j] * b
    return out


def to_serializable(x: Scalar) -> dict:
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator}
    return {"val": float(x)}


def from_serializable(entry: dict) -> Scalar:
    if "val" in entry and entry["val"] is not None:
        return float(entry["val"])
    return Fraction(int(entry["num"]), int(entry.get("den", 1)))


def left_inverse(b) -> np.ndarray:
    """(B^T B)^-1 B^T for a matrix with independent columns."""
    arr = np.asarray(b)
    return np.dot(inverse(np.dot(arr.T, arr)), arr.T)


def signature(sym, tol: Optional[float] = None) -> Tuple[int, int, int]:
    """(n_plus, n_zero, n_minus) of a symmetric matrix by congruence diagonalization."""
    arr = np.asarray(sym)
    exact_mode = arr.dtype == object
    work = exact(arr) if exact_mode else np.array(arr, dtype=float)
    tol = None if exact_mode else (settings.TOL if tol is None else tol)
    n = work.shape[0]
    plus = minus = 0
    active = list(range(n))

    def nonzero(x) -> bool:
        return x != 0 if tol is None else abs(x) > tol

    while active:
        pivot = next((i for i in active if nonzero(work[i, i])), None)
        if pivot is None:
            pair = next(((i, j) for i in active for j in active if i < j and nonzero(work[i, j])), None)
            if pair is None:
                break
            i, j = pair
            # congruence by e_i -> e_i + e_j puts 2 w_ij on the diagonal
            work[i, :] = work[i, :] + work[j, :]
            work[:, i] = work[:, i] + work[:, j]
            pivot = i
        d = work[pivot, pivot]
        if d > 0:
            plus += 1
        else:
            minus += 1
        active.remove(pivot)
        for r in active:
            if nonzero(work[r, pivot]):
                factor = work[r, pivot] / d
                work[r, :] = work[r, :] - factor * work[pivot, :]
                work[:, r] = work[:, r] - factor * work[:, pivot]
    return plus, n - plus - minus, minus


class IncrementalSpan:
    """Echelon bookkeeping for growing a span one vector at a time."""

    def __init__(self, length: int, exact_mode: bool = True, tol: Optional[float] = None):
        self.length = length
        self.exact_mode = exact_mode
        self.tol = None if exact_mode else (settings.TOL if tol is None else tol)
        self._rows: List[Tuple[int, np.ndarray]] = []

    def __len__(self) -> int:
        return len(self._rows)

    def reduce(self, v) -> np.ndarray:
        r = exact(v) if self.exact_mode else np.array(v, dtype=float)
        for p, row in self._rows:
            if r[p] != 0 if self.tol is None else abs(r[p]) > self.tol:
                r = r - r[p] * row
        return r

    def contains(self, v) -> bool:
        return not np.any(nonzero_mask(self.reduce(v), self.tol))

    def add(self, v) -> bool:
        """Add ``v``; False when it already lies in the span."""
        r = self.reduce(v)
        nz = np.flatnonzero(nonzero_mask(r, self.tol))
        if nz.size == 0:
            return False
        p = int(nz[0])
        self._rows.append((p, r / r[p]))
        return True


def vanishes(x, tol: Optional[float] = None) -> bool:
    """Zero test for a scalar residual: exact for rationals, tolerance based for floats."""
    if isinstance(x, (float, np.floating)):
        return abs(x) <= (settings.TOL if tol is None else tol)
    return x == 0
