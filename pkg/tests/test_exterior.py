from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core import linalg as la
from app.core.errors import (
    DegenerateFormError,
    DegreeError,
    DimensionMismatchError,
    NotSkewError,
    ScalarModeError,
    UnsupportedMetricError,
)
from app.core.exterior import (
    AltForm,
    CurvOperator,
    EucSpace,
    derivation_action,
    endo_form,
    endo_norm_sq,
    form_endo,
    hodge_star,
    interior,
    lower,
    raise_form,
    tau_squared,
    torsion_endo,
    wedge,
    wedge_endo,
)
from app.core.liealg import bracket
from tests.conftest import alt_forms, positive_diagonal_grams, rational_matrices


def e(dim, *idx):
    return AltForm.basis(dim, *idx)


def test_basis_forms_are_alternating():
    assert e(3, 1, 0) == -e(3, 0, 1)
    assert e(3, 0, 0).is_zero()
    assert e(4, 2, 0, 1)[(0, 1, 2)] == 1
    assert e(4, 0, 2, 1)[(0, 1, 2)] == -1


def test_invalid_index_is_rejected():
    with pytest.raises(DimensionMismatchError):
        AltForm(3, 2, {(0, 3): 1})
    with pytest.raises(DimensionMismatchError):
        AltForm(3, 2, {(0,): 1})


def test_mixed_modes_are_rejected():
    with pytest.raises(ScalarModeError):
        e(3, 0) + AltForm.basis(3, 0, mode="float")


def test_wedge_and_interior_on_basis():
    assert wedge(e(3, 0), e(3, 1)) == e(3, 0, 1)
    assert (e(3, 1) ^ e(3, 0)) == -e(3, 0, 1)
    assert interior(la.exact([1, 0, 0]), AltForm.volume(3)) == e(3, 1, 2)
    assert interior(la.exact([0, 1, 0]), AltForm.volume(3)) == -e(3, 0, 2)
    assert wedge(e(3, 0, 1), e(3, 1, 2)).is_zero()


def test_wedge_beyond_dimension_vanishes():
    assert wedge(e(3, 0, 1), e(3, 1, 2)).degree == 4


def test_form_endo_convention():
    a = form_endo(e(3, 0, 1))
    x, y = la.exact([1, 0, 0]), la.exact([0, 1, 0])
    assert la.is_zero(np.dot(a, x) - y)
    assert la.is_zero(a - wedge_endo(x, y))
    assert endo_form(a) == e(3, 0, 1)


def test_endo_form_rejects_non_skew():
    with pytest.raises(NotSkewError):
        endo_form(la.eye(3))


def test_form_endo_needs_two_form():
    with pytest.raises(DegreeError):
        form_endo(e(3, 0, 1, 2))


def test_lower_and_raise_with_metric():
    gram = la.exact([[2, 0], [0, 3]])
    x = la.exact([1, 1])
    alpha = lower(x, gram)
    assert alpha == AltForm(2, 1, {(0,): 2, (1,): 3})
    assert la.is_zero(raise_form(alpha, gram) - x)


def test_hodge_star_on_r3():
    assert hodge_star(e(3, 0)) == e(3, 1, 2)
    assert hodge_star(e(3, 1)) == -e(3, 0, 2)
    assert hodge_star(AltForm.volume(3))[()] == 1


def test_hodge_star_rejects_a_non_orthonormal_gram():
    assert hodge_star(e(3, 0), la.eye(3, True)) == e(3, 1, 2)
    with pytest.raises(UnsupportedMetricError, match="orthonormal"):
        hodge_star(e(3, 0), la.exact([[1, 0, 0], [0, 1, 0], [0, 0, 2]]))


def test_torsion_endo_of_volume_form():
    tau = AltForm.volume(3)
    t = torsion_endo(tau, la.exact([1, 0, 0]))
    assert la.is_zero(t - form_endo(e(3, 1, 2)))


def test_float_form_compares_with_tolerance():
    alpha = e(3, 0, 1).as_float()
    beta = alpha + AltForm(3, 2, {(0, 1): 1e-12}, mode="float")
    assert alpha == beta
    assert alpha.mode == "float"


def test_constant_curvature_operator():
    r = CurvOperator.constant_curvature(3, 1)
    assert r.is_symmetric()
    assert r.bianchi_residual() == 0
    assert la.is_zero(r.ricci() - 2 * la.eye(3))
    assert r.scal() == 6
    assert r.sectional(la.exact([1, 0, 0]), la.exact([0, 1, 0])) == 1


def test_tau_squared_of_volume_form():
    sq = tau_squared(AltForm.volume(3))
    assert sq.is_symmetric()
    # −|τ_X Y|² on an orthonormal pair
    x, y = la.exact([1, 0, 0]), la.exact([0, 1, 0])
    assert sq.value(x, y, x, y) == -1


def test_curvature_from_endos_round_trip():
    r = CurvOperator.constant_curvature(4, Fraction(1, 2))
    again = CurvOperator.from_endos(r.endos())
    assert la.is_zero(again.arr - r.arr)


def test_four_form_as_curvature_operator():
    r = CurvOperator.from_form4(AltForm.volume(4))
    assert r.is_symmetric()
    with pytest.raises(DegreeError):
        CurvOperator.from_form4(AltForm.volume(3))


def test_endo_norm_sq():
    assert endo_norm_sq(form_endo(e(3, 0, 1))) == 2
    assert endo_norm_sq(la.eye(3)) == 3


def test_euclidean_space_validates_gram():
    assert EucSpace(3).inner(la.exact([1, 2, 0]), la.exact([1, 2, 0])) == 5
    with pytest.raises(DimensionMismatchError):
        EucSpace(0)
    with pytest.raises(DimensionMismatchError):
        EucSpace(3, la.eye(2))
    with pytest.raises(NotSkewError):
        EucSpace(2, la.exact([[1, 1], [0, 1]]))
    with pytest.raises(DegenerateFormError):
        EucSpace(2, la.exact([[1, 0], [0, -1]]))


# properties


@given(rational_matrices(4), alt_forms(4, 1), alt_forms(4, 2))
@settings(max_examples=200, deadline=None)
def test_derivation_satisfies_leibniz_rule(a, alpha, beta):
    lhs = derivation_action(a, wedge(alpha, beta))
    rhs = wedge(derivation_action(a, alpha), beta) + wedge(alpha, derivation_action(a, beta))
    assert lhs == rhs


@given(rational_matrices(4), rational_matrices(4), alt_forms(4, 2))
@settings(max_examples=200, deadline=None)
def test_derivation_respects_commutators(a, b, alpha):
    lhs = derivation_action(bracket(a, b), alpha)
    rhs = derivation_action(a, derivation_action(b, alpha)) - derivation_action(b, derivation_action(a, alpha))
    assert lhs == rhs


@given(alt_forms(4, 2), positive_diagonal_grams(4))
@settings(max_examples=100, deadline=None)
def test_two_form_dictionary_round_trip(alpha, gram):
    a = form_endo(alpha, gram)
    mat = np.dot(a.T, gram)
    assert la.is_zero(mat + mat.T)
    assert endo_form(a, gram) == alpha


@given(alt_forms(5, 2), alt_forms(5, 3))
@settings(max_examples=50, deadline=None)
def test_wedge_is_graded_commutative(alpha, beta):
    assert wedge(alpha, beta) == wedge(beta, alpha)


@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=3), min_size=4, max_size=4),
       alt_forms(4, 1), alt_forms(4, 2))
@settings(max_examples=100, deadline=None)
def test_interior_is_an_antiderivation(x, alpha, beta):
    v = la.exact(x)
    lhs = interior(v, wedge(alpha, beta))
    rhs = wedge(interior(v, alpha), beta) - wedge(alpha, interior(v, beta))
    assert lhs == rhs
