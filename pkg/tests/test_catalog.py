from fractions import Fraction

import numpy as np
import pytest

from app.core import catalog
from app.core import linalg as la
from app.core.errors import MalformedInputError, UnknownModelError


def test_registry_lists_every_model():
    assert set(catalog.MODEL_BUILDERS) == {
        "kxk", "symmetric-su2", "s6", "flag", "cp3", "s3s3", "berger", "3ad-tensors", "3ad-sphere",
        "stiefel", "dim3", "product-vol3", "g2-form", "su3-form",
    }


def test_parse_params():
    assert catalog.parse_params("kxk", ["t=1/2"]) == {"t": Fraction(1, 2)}
    assert catalog.parse_params("stiefel", {"n": "4"}) == {"n": 4}
    assert catalog.parse_params("g2-form", []) == {}


@pytest.mark.parametrize("name,pairs", [
    ("kxk", ["s=1"]),
    ("kxk", ["t"]),
    ("kxk", ["t=abc"]),
    ("kxk", ["t=1/0"]),
    ("stiefel", ["n=three"]),
    ("g2-form", ["t=1"]),
])
def test_parse_params_rejects_malformed_pairs(name, pairs):
    with pytest.raises(MalformedInputError):
        catalog.parse_params(name, pairs)


def test_unknown_model():
    with pytest.raises(UnknownModelError):
        catalog.parse_params("nope", [])
    with pytest.raises(UnknownModelError):
        catalog.build("nope")


@pytest.mark.parametrize("name,params,dim", [
    ("kxk", {"t": "2"}, 3),
    ("symmetric-su2", {}, 3),
    ("dim3", {}, 3),
    ("dim3", {"variant": "sasaki", "t": "1"}, 3),
    ("product-vol3", {}, 6),
    ("g2-form", {}, 7),
    ("su3-form", {}, 6),
    ("3ad-tensors", {"n": "2"}, 11),
    ("3ad-sphere", {}, 7),
    ("stiefel", {"n": "3"}, 7),
    ("berger", {}, 7),
    ("s6", {}, 6),
])
def test_build_dimensions(name, params, dim):
    bundle = catalog.build(name, params)
    assert bundle.dim == dim
    assert bundle.gram.shape == (dim, dim)


def test_kxk_tensors_are_invariant(kxk_half):
    residuals = kxk_half.invariance_residuals()
    assert "tau" in residuals
    assert all(r == 0 for r in residuals.values())


def test_formal_bundles_carry_no_model():
    bundle = catalog.build("g2-form")
    assert bundle.model is None
    assert bundle.invariance_residuals() == {}
    with pytest.raises(UnknownModelError):
        bundle.lam_tau


@pytest.mark.parametrize("params", [
    {"t": "0"},
    {"variant": "round"},
    {"variant": "sasaki", "t": "1/2"},
    {"variant": "sasaki", "t": "-1"},
])
def test_dim3_parameter_checks(params):
    with pytest.raises(MalformedInputError):
        catalog.build("dim3", params)


def test_threead_defaults_and_relations():
    bundle = catalog.build_3ad_tensors(n=1, alpha=1, delta=5)
    assert bundle.params["gamma"] == 2
    residuals = catalog.threead_relation_residuals(bundle)
    assert all(r == 0 for r in residuals.values())
    with pytest.raises(MalformedInputError):
        catalog.build_3ad_tensors(n=0)
    with pytest.raises(MalformedInputError):
        catalog.build_3ad_tensors(alpha=0)


def test_threead_sphere_needs_scales_of_one_sign():
    with pytest.raises(MalformedInputError):
        catalog.build("3ad-sphere", {"alpha": "0"})
    with pytest.raises(MalformedInputError, match=r"alpha\*delta"):
        catalog.build("3ad-sphere", {"alpha": "1", "delta": "-1"})
    bundle = catalog.build("3ad-sphere", {"delta": "5"})
    assert bundle.params["nearly_parallel"]
    assert "auxiliary" in bundle.tensors


def test_rational_sqrt():
    assert catalog.rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert catalog.rational_sqrt(2) is None
    assert catalog.rational_sqrt(-1) is None


def test_gray_normalization():
    bundle = catalog.build("s6")
    assert bundle.params["scal"] * bundle.params["rescale"] == 30
    assert bundle.params["mu"] > 0
    j0 = bundle.tensors["J0"]
    assert la.is_zero(np.dot(j0, j0) + bundle.params["mu"] * la.eye(6))
    with pytest.raises(UnknownModelError):
        catalog.build_gray("s7")


def test_as_float(kxk_half):
    bundle = kxk_half.as_float()
    assert not bundle.exact_mode
    assert bundle.tau.mode == "float"
    assert bundle.gram.dtype == np.float64
    assert bundle.tensors["structure"].dtype == np.float64
    assert bundle.params == kxk_half.params


def test_threead_sphere_with_negative_alpha_and_delta():
    bundle = catalog.build("3ad-sphere", {"alpha": "-1", "delta": "-5"})
    assert bundle.params["horizontal_scale"] == Fraction(1, 20)
    assert bundle.params["nearly_parallel"]
    assert all(r == 0 for r in bundle.invariance_residuals().values())
    assert all(r == 0 for r in catalog.threead_relation_residuals(bundle).values())
