from fractions import Fraction

import numpy as np
import pytest

from app.core import catalog
from app.core import linalg as la
from app.core.errors import NotEquivariantError, NotInvariantError, NotReductiveError, NotSubalgebraError
from app.core.exterior import AltForm, CurvOperator, form_endo
from app.core.reductive import (
    NomizuMap,
    ReductiveModel,
    canonical,
    connection_report,
    einstein_residual,
    exterior_derivative_invariant,
    fit_kappa,
    holonomy,
    levi_civita,
    parallel_residual,
    riemann_from_tau,
    transvection,
    with_torsion,
)


def E(n, i, j):
    return form_endo(AltForm.basis(n, i, j))


def test_from_matrices_rejects_non_closed_sum():
    with pytest.raises(NotSubalgebraError):
        ReductiveModel.from_matrices([E(3, 0, 1)], [E(3, 0, 2)])


def test_from_matrices_rejects_non_reductive_complement():
    with pytest.raises(NotReductiveError):
        ReductiveModel.from_matrices([E(3, 0, 1)], [E(3, 0, 2) + E(3, 0, 1), E(3, 1, 2)])
    with pytest.raises(NotReductiveError):
        ReductiveModel.from_matrices([E(3, 0, 1)], [E(3, 0, 1)])


def test_symmetric_pair(symmetric_su2):
    model = symmetric_su2.model
    assert model.is_symmetric
    assert model.is_naturally_reductive
    assert levi_civita(model).is_zero()
    assert holonomy(model, canonical(model)).dimension == 3
    assert model.jacobi_residual() == 0


def test_canonical_connection_of_kxk(kxk_half):
    model = kxk_half.model
    assert not model.is_symmetric
    assert model.is_naturally_reductive
    report = connection_report(model, canonical(model))
    assert report.metric
    assert report.holonomy.dimension == 3
    assert report.torsion_form == kxk_half.tau * 2
    assert len(model.mm_h_image()) == 3


def test_torsion_connection_is_canonical_on_naturally_reductive(kxk_half):
    assert kxk_half.lam_tau.is_zero()
    assert parallel_residual(kxk_half.model, kxk_half.lam_tau, kxk_half.tau) == 0
    assert kxk_half.model.invariance_residual(kxk_half.tau) == 0


@pytest.mark.parametrize("t, expected", [(0, 3), (Fraction(1, 2), 3), (2, 3), (1, 0), (-1, 0)])
def test_kxk_holonomy_dimensions(t, expected):
    model = catalog.build_kxk(t).model
    assert holonomy(model, canonical(model)).dimension == expected


def test_non_equivariant_nomizu_map_is_rejected(kxk_half):
    model = kxk_half.model
    zero = la.zeros((3, 3))
    lam = NomizuMap([E(3, 0, 1), zero, zero])
    assert lam.equivariance_residual(model) != 0
    with pytest.raises(NotEquivariantError):
        connection_report(model, lam)


def test_parallel_residual_requires_invariant_tensor(kxk_half):
    with pytest.raises(NotInvariantError):
        parallel_residual(kxk_half.model, canonical(kxk_half.model), kxk_half.model.unit(0))


def test_transvection_of_kxk(kxk_half):
    tr = transvection(kxk_half.model, canonical(kxk_half.model))
    assert tr.dimension == 6
    assert tr.jacobi_residual() == 0
    assert tr.killing().negative_definite


def test_riemann_from_tau_cross_checks(kxk_half):
    report = riemann_from_tau(kxk_half.model, kxk_half.tau, kxk_half.lam_tau)
    assert all(v == 0 for v in report.residuals.values())
    assert einstein_residual(report.ricci) == 0


def test_kxk_kappa_fit():
    bundle = catalog.build_kxk(Fraction(1, 2))
    fit = fit_kappa(bundle.model, bundle.lam_tau, bundle.tau)
    assert fit.residual == 0
    assert fit.scal_residual == 0
    assert fit.kappa == 3


@pytest.mark.parametrize("t", [1, 2])
def test_dim3_flat_torsion_connection(t):
    bundle = catalog.build_dim3(t)
    model = bundle.model
    assert model.dim_h == 0
    report = connection_report(model, bundle.lam_tau)
    assert report.holonomy.dimension == 0
    assert report.curvature_operator.is_zero()
    riemann = riemann_from_tau(model, bundle.tau, bundle.lam_tau)
    expected = CurvOperator.constant_curvature(3, Fraction(t) ** 2)
    assert (riemann.curvature - expected).is_zero()


def test_dim3_sasaki_reeb_field():
    bundle = catalog.build_dim3(1, variant="sasaki")
    xi = bundle.tensors["xi"]
    d_xi = exterior_derivative_invariant(bundle.model, xi)
    assert d_xi.degree == 2
    assert parallel_residual(bundle.model, bundle.lam_tau, xi) == 0
    assert holonomy(bundle.model, bundle.lam_tau).dimension == 1


def test_float_model_matches_exact(kxk_half):
    model = kxk_half.model.as_float()
    assert not model.exact_mode
    assert holonomy(model, canonical(model)).dimension == 3
    lam = with_torsion(model, kxk_half.tau.as_float())
    assert np.allclose(np.array(lam.maps, dtype=float), 0.0)
