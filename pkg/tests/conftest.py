from fractions import Fraction
from itertools import combinations

import hypothesis.strategies as st
import numpy as np
import pytest

from app.core import catalog
from app.core.exterior import AltForm

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def alt_forms(draw, dim: int, degree: int):
    keys = list(combinations(range(dim), degree))
    coeffs = draw(st.lists(rationals, min_size=len(keys), max_size=len(keys)))
    return AltForm(dim, degree, {k: c for k, c in zip(keys, coeffs) if c != 0})


@st.composite
def rational_matrices(draw, n: int):
    entries = draw(st.lists(rationals, min_size=n * n, max_size=n * n))
    return np.array(entries, dtype=object).reshape(n, n)


@st.composite
def skew_matrices(draw, n: int):
    a = draw(rational_matrices(n))
    return a - a.T


@st.composite
def positive_diagonal_grams(draw, n: int):
    diag = draw(st.lists(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=4),
                         min_size=n, max_size=n))
    g = np.full((n, n), Fraction(0), dtype=object)
    for i, d in enumerate(diag):
        g[i, i] = d
    return g


@pytest.fixture(scope="session")
def g2_form():
    return catalog.build_g2_form()


@pytest.fixture(scope="session")
def kxk_half():
    return catalog.build("kxk", {"t": "1/2"})


@pytest.fixture(scope="session")
def symmetric_su2():
    return catalog.build("symmetric-su2")
