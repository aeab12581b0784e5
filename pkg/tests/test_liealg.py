from fractions import Fraction

import pytest

from app.core import catalog
from app.core import linalg as la
from app.core.errors import IndeterminateSplitError, NotSkewError, NotSubalgebraError
from app.core.exterior import AltForm, form_endo
from app.core.liealg import (
    LieSubalgebra,
    StructureAlgebra,
    bracket,
    casimir,
    casimir_so,
    commutant,
    curvature_space_dim,
    decompose,
    decompose_action,
    intersection,
    invariant_vectors,
    killing,
    so_algebra,
    span_close,
    stabilizer,
)


def E(n, i, j):
    return form_endo(AltForm.basis(n, i, j))


def _block_sum(n_blocks, size=3):
    n = n_blocks * size
    return [E(n, b * size + i, b * size + j) for b in range(n_blocks) for i, j in ((1, 2), (2, 0), (0, 1))]


def test_so_algebra_dimensions():
    for n in range(2, 6):
        g = so_algebra(n)
        assert g.dimension == n * (n - 1) // 2
        assert g.structure_constants is not None
        assert g.skew_residual() == 0


def test_span_close_generates_so3():
    g = span_close([E(3, 0, 1), E(3, 1, 2)])
    assert g.dimension == 3
    assert g.closure_residual() == 0


def test_span_close_rejects_non_skew():
    with pytest.raises(NotSkewError):
        span_close([la.eye(3)])


def test_non_closed_span_is_not_a_subalgebra():
    with pytest.raises(NotSubalgebraError):
        LieSubalgebra(3, [E(3, 0, 1), E(3, 1, 2)])


def test_stabilizer_of_two_form_and_volume():
    assert stabilizer(AltForm.basis(3, 0, 1)).dimension == 1
    assert stabilizer(AltForm.volume(3)).dimension == 3
    assert stabilizer(AltForm.basis(4, 0, 1) + AltForm.basis(4, 2, 3)).dimension == 4


def test_stabilizer_of_g2_form(g2_form):
    g = stabilizer(g2_form)
    assert g.dimension == 14
    assert killing(g).negative_definite


def test_stabilizer_float_mode_agrees(g2_form):
    assert stabilizer(g2_form.as_float()).dimension == 14


def test_intersection_of_block_algebras():
    a = span_close([E(4, 0, 1), E(4, 1, 2)])
    b = span_close([E(4, 1, 2), E(4, 2, 3)])
    assert intersection(a, b).dimension == 1


def test_commutant_of_irreducible_and_reducible_actions():
    c = commutant(so_algebra(3))
    assert (c.full_dim, len(c.symmetric), len(c.skew)) == (1, 1, 0)
    blocks = LieSubalgebra(6, _block_sum(2))
    c = commutant(blocks)
    assert len(c.symmetric) == 2


def test_decompose_block_action():
    rep = decompose(LieSubalgebra(6, _block_sum(2)), seed=0)
    assert sorted(rep.dims) == [3, 3]
    assert all(rep.irreducible)
    assert len(rep.isotypic) == 2
    total = rep.projector(0) + rep.projector(1)
    assert la.is_zero(total - la.eye(6))


def test_decompose_is_seed_independent_up_to_projectors():
    a = decompose(LieSubalgebra(6, _block_sum(2)), seed=1).isotypic_projectors()
    b = decompose(LieSubalgebra(6, _block_sum(2)), seed=7).isotypic_projectors()
    assert all(la.is_zero(p - q) for p, q in zip(a, b))


def su3_in_so7(phi):
    return intersection(stabilizer(phi), stabilizer(AltForm.basis(7, 0)))


def so4_in_g2(phi):
    return intersection(stabilizer(phi), stabilizer(AltForm.basis(7, 0, 1, 2)))


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("subalgebra, dim, dims", [(su3_in_so7, 8, [1, 6]), (so4_in_g2, 6, [3, 4])])
def test_decompose_subalgebras_of_g2(g2_form, subalgebra, dim, dims, seed):
    g = subalgebra(g2_form)
    assert g.dimension == dim
    rep = decompose(g, seed=seed)
    assert sorted(rep.dims) == dims
    assert all(rep.irreducible)
    reference = decompose(g, seed=0).isotypic_projectors()
    assert all(la.is_zero(p - q) for p, q in zip(rep.isotypic_projectors(), reference))


def test_exact_split_needs_a_rational_eigenvalue_grouping():
    # x^4 + 3x^2 + 1 is irreducible, so the two invariant planes of a are not rational
    a = la.zeros((4, 4))
    for i in range(3):
        a[i + 1, i], a[i, i + 1] = Fraction(1), Fraction(-1)
    with pytest.raises(IndeterminateSplitError):
        decompose_action([a], 4, seed=0)
    rep = decompose_action([la.as_float(a)], 4, seed=0)
    assert rep.dims == [2, 2]


@pytest.mark.parametrize("n", range(3, 9))
def test_casimir_of_so_n(n):
    assert la.is_zero(casimir_so(n) - (n - 1) * la.eye(n))


def test_casimir_of_so3_with_trace_form():
    assert la.is_zero(casimir(so_algebra(3)) - 2 * la.eye(3))


def test_killing_form_verdicts():
    assert killing(so_algebra(3)).verdict == "negative definite"
    abelian = LieSubalgebra(4, [E(4, 0, 1), E(4, 2, 3)])
    assert killing(abelian).verdict == "zero"


@pytest.mark.parametrize("builder, expected", [
    (lambda: so_algebra(3), 6),
    (catalog.su3_adjoint, 1),
    (catalog.so3_harmonic_cubics, 0),
])
def test_curvature_space_dimensions(builder, expected):
    dim, basis = curvature_space_dim(builder())
    assert dim == expected
    assert all(op.bianchi_residual() == 0 for op in basis)


def test_structure_algebra_of_so4():
    algebra = so_algebra(4).structure_algebra()
    assert algebra.jacobi_residual() == 0
    assert algebra.antisymmetry_residual() == 0
    assert not algebra.is_simple(seed=0)
    ideals = algebra.ideals(seed=0)
    assert sorted(b.shape[1] for b in ideals) == [3, 3]
    for basis in ideals:
        assert algebra.subalgebra(basis).is_simple(seed=0)


def test_structure_algebra_bracket():
    c = la.zeros((3, 3, 3))
    c[0, 1, 2], c[1, 0, 2] = Fraction(1), Fraction(-1)
    c[1, 2, 0], c[2, 1, 0] = Fraction(1), Fraction(-1)
    c[2, 0, 1], c[0, 2, 1] = Fraction(1), Fraction(-1)
    algebra = StructureAlgebra(c)
    x, y = la.exact([1, 0, 0]), la.exact([0, 1, 0])
    assert la.is_zero(algebra.bracket(x, y) - la.exact([0, 0, 1]))
    assert algebra.is_simple()


def test_bracket_of_basis_endomorphisms():
    assert la.is_zero(bracket(E(3, 0, 1), E(3, 1, 2)) + E(3, 0, 2))


def test_invariant_vectors_of_so3_on_r4():
    basis = []
    for l in catalog.su2_basis():
        m = la.zeros((4, 4))
        m[:3, :3] = l
        basis.append(m)
    fixed = invariant_vectors(LieSubalgebra(4, basis))
    assert fixed.shape == (4, 1)
    assert all(fixed[i, 0] == 0 for i in range(3))
    assert fixed[3, 0] != 0
    assert invariant_vectors(so_algebra(4)).shape[1] == 0
