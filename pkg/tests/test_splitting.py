import logging

import numpy as np
import pytest

from app.core import catalog, splitting
from app.core import linalg as la
from app.core.errors import DimensionMismatchError, NotInvariantError, NotSubalgebraError
from app.core.exterior import AltForm
from app.core.liealg import LieSubalgebra, intersection, so_algebra, stabilizer
from app.core.splitting import canonical_splitting, decomposability_search, torsion_split


def so3_on_r4() -> LieSubalgebra:
    """so(3) acting on the first three coordinates of R^4, trivially on e_4."""
    basis = []
    for l in catalog.su2_basis():
        m = la.zeros((4, 4))
        m[:3, :3] = l
        basis.append(m)
    return LieSubalgebra(4, basis)


@pytest.fixture(scope="module")
def product_vol3():
    return catalog.build("product-vol3")


def test_product_torsion_is_decomposable(product_vol3):
    verdict = decomposability_search(product_vol3.tensors["g"], product_vol3.tau)
    assert verdict.decomposable
    t1, t2 = verdict.witness
    assert sorted([t1.shape[1], t2.shape[1]]) == [3, 3]
    assert verdict.summary == "decomposable as 3 + 3"


def test_g2_form_is_indecomposable(g2_form):
    verdict = decomposability_search(stabilizer(g2_form), g2_form)
    assert not verdict.decomposable
    assert verdict.witness is None


def test_product_splitting_is_all_horizontal(product_vol3):
    s = canonical_splitting(product_vol3.tensors["g"], product_vol3.tau)
    assert s.horizontal == [True, True]
    assert (s.dim_h, s.dim_v) == (6, 0)
    assert s.is_admissible


def test_g2_splitting(g2_form):
    s = canonical_splitting(stabilizer(g2_form), g2_form)
    assert s.decomposition.dims == [7]
    assert s.supported_dims == [14]
    assert (s.dim_h, s.dim_v) == (7, 0)
    assert s.admissibility == 0


def test_trivial_summand_is_vertical():
    tau = AltForm.from_terms(4, 3, [((0, 1, 2), 1)])
    s = canonical_splitting(so3_on_r4(), tau)
    assert (s.dim_h, s.dim_v) == (3, 1)
    assert len(s.vertical_blocks) == 1
    split = torsion_split(s, tau)
    assert split.horizontal == tau
    assert split.mixed.is_zero()
    assert split.vertical.is_zero()
    assert split.admissible
    assert split.total() == tau


def test_split_of_the_kxk_torsion(kxk_half):
    tau = kxk_half.tau
    s = canonical_splitting(stabilizer(tau), tau)
    split = torsion_split(s, tau)
    assert split.total() == tau
    assert split.oneill == -split.mixed
    assert s.is_admissible


def test_splitting_rejects_bad_input(g2_form):
    g = so3_on_r4()
    with pytest.raises(DimensionMismatchError):
        canonical_splitting(g, g2_form)
    with pytest.raises(NotInvariantError):
        canonical_splitting(g, AltForm.from_terms(4, 3, [((0, 1, 3), 1)]))
    with pytest.raises(NotSubalgebraError):
        canonical_splitting(g, AltForm.from_terms(4, 3, [((0, 1, 2), 1)]), hol=so_algebra(4))


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("fixed, dims", [(AltForm.basis(7, 0), (6, 1)), (AltForm.basis(7, 0, 1, 2), (4, 3))])
def test_splittings_inside_g2_are_seed_independent(g2_form, fixed, dims, seed):
    g = intersection(stabilizer(g2_form), stabilizer(fixed))
    s = canonical_splitting(g, g2_form, seed)
    reference = canonical_splitting(g, g2_form, 0)
    assert (s.dim_h, s.dim_v) == dims
    assert la.is_zero(s.p_h - reference.p_h)
    assert la.is_zero(s.p_v - reference.p_v)


def test_repeated_isotypic_class_goes_to_v(product_vol3, monkeypatch, caplog):
    zero = la.zeros((3, 3))
    diagonal = LieSubalgebra(6, [np.block([[l, zero], [zero, l]]) for l in catalog.su2_basis()])
    monkeypatch.setattr(splitting, "_supported_on", lambda g, block: 1)
    with caplog.at_level(logging.WARNING, logger="app.core.splitting"):
        s = canonical_splitting(diagonal, product_vol3.tau)
    assert s.supported_dims == [1, 1]
    assert (s.dim_h, s.dim_v) == (0, 6)
    assert "moving it to V" in caplog.text
