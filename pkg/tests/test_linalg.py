from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings

from app.core import linalg as la
from app.core.errors import DegenerateFormError
from tests.conftest import rational_matrices


def test_exact_arrays_hold_fractions():
    a = la.exact([[1, 2], [3, 4]])
    assert a.dtype == object
    assert all(isinstance(x, Fraction) for x in a.flat)
    assert la.is_exact(a)
    assert not la.is_exact(la.as_float(a))


def test_rank_and_nullspace():
    m = la.exact([[1, 2, 3], [2, 4, 6]])
    assert la.rank(m) == 1
    kernel = la.nullspace(m)
    assert kernel.shape == (3, 2)
    assert la.is_zero(np.dot(m, kernel))


def test_solve_inconsistent_system():
    m = la.exact([[1, 1], [1, 1]])
    assert la.solve(m, la.exact([1, 2])) is None
    x = la.solve(m, la.exact([2, 2]))
    assert la.is_zero(np.dot(m, x) - la.exact([2, 2]))


def test_inverse_of_singular_matrix_raises():
    with pytest.raises(DegenerateFormError):
        la.inverse(la.exact([[1, 2], [2, 4]]))


@given(rational_matrices(3))
@settings(max_examples=50, deadline=None)
def test_inverse_is_exact(m):
    assume(la.rank(m) == 3)
    assert la.is_zero(np.dot(m, la.inverse(m)) - la.eye(3))


@pytest.mark.parametrize("matrix, expected", [
    ([[1, 0, 0], [0, 0, 0], [0, 0, -1]], (1, 1, 1)),
    ([[0, 1], [1, 0]], (1, 0, 1)),
    ([[2, 1], [1, 2]], (2, 0, 0)),
    ([[-1, 0], [0, -3]], (0, 0, 2)),
])
def test_signature(matrix, expected):
    assert la.signature(la.exact(matrix)) == expected


def test_float_rank_uses_tolerance():
    m = np.array([[1.0, 0.0], [0.0, 1e-12]])
    assert la.rank(m) == 1
    assert la.rank(m, tol=1e-15) == 2


def test_projector_and_complement():
    gram = la.exact([[2, 0, 0], [0, 1, 0], [0, 0, 1]])
    basis = la.exact([[1], [1], [0]])
    p = la.projector(basis, gram)
    assert la.is_zero(np.dot(p, p) - p)
    comp = la.orthogonal_complement(basis, gram)
    assert comp.shape[1] == 2
    assert la.is_zero(np.dot(np.dot(basis.T, gram), comp))


def test_incremental_span():
    span = la.IncrementalSpan(3)
    assert span.add(la.exact([1, 1, 0]))
    assert span.add(la.exact([0, 1, 1]))
    assert not span.add(la.exact([1, 2, 1]))
    assert span.contains(la.exact([2, 1, -1]))
    assert len(span) == 2


def test_vanishes():
    assert la.vanishes(Fraction(0))
    assert not la.vanishes(Fraction(1, 10 ** 12))
    assert la.vanishes(1e-12)
    assert not la.vanishes(1e-12, tol=1e-15)


def test_serializable_scalars():
    assert la.to_serializable(Fraction(-3, 4)) == {"num": -3, "den": 4}
    assert la.from_serializable({"num": 5, "den": 10}) == Fraction(1, 2)
    assert la.from_serializable({"val": 0.25}) == 0.25
