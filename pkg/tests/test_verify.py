from fractions import Fraction

import pytest

from app.core.errors import MalformedInputError, UnknownSuiteError
from app.services import verify
from app.services.citations import CITATIONS, SECTIONS, cite
from app.services.verify import CHECKS, SUITES, Check, checks_for, list_suites, run_check, run_suite


def test_check_ids_are_unique_and_anchored():
    ids = [c.id for c in CHECKS]
    assert len(ids) == len(set(ids))
    for check in CHECKS:
        assert check.ref in CITATIONS
        assert check.suite in SUITES


def test_every_citation_resolves():
    for ref, citation in CITATIONS.items():
        assert citation.ref == ref
        assert citation.section in SECTIONS
        assert citation.quote
    assert {c.ref for c in CHECKS} == set(CITATIONS)
    assert cite("s4").quote == "(τ_V)_* τ^H = 0"
    with pytest.raises(MalformedInputError):
        cite("nope")


def test_results_carry_their_citation():
    refs = {c.id: c.ref for c in CHECKS}
    for result in run_suite("dim3", seed=0).checks:
        assert result.anchor == CITATIONS[refs[result.id]]
        assert str(result.anchor).startswith("dimension three: ")


def test_every_suite_has_checks():
    counts = list_suites()
    for name in SUITES:
        assert counts[name] >= 1
    assert counts["all"] == sum(counts[name] for name in SUITES)
    assert len(checks_for("all")) == counts["all"]


def test_unknown_suite():
    with pytest.raises(UnknownSuiteError):
        checks_for("nope")
    with pytest.raises(UnknownSuiteError):
        run_suite("nope")


@pytest.mark.parametrize("kwargs", [{"mode": "decimal"}, {"tol": 0}, {"tol": -1e-9}])
def test_run_suite_rejects_bad_settings(kwargs):
    with pytest.raises(MalformedInputError):
        run_suite("dim3", **kwargs)


def test_results_are_ordered_and_deterministic():
    first = run_suite("dim3", seed=7)
    second = run_suite("dim3", seed=7)
    ids = [c.id for c in first.checks]
    assert ids == sorted(ids)
    assert [(c.id, c.status, c.residual) for c in first.checks] == \
           [(c.id, c.status, c.residual) for c in second.checks]
    assert first.tol is None
    assert first.seed == 7


@pytest.mark.parametrize("suite", SUITES)
def test_suite_passes_in_exact_mode(suite):
    report = run_suite(suite, mode="exact")
    failures = [(c.id, c.observed, c.detail) for c in report.checks if c.status == "fail"]
    assert failures == []
    assert report.ok
    assert report.passed + report.skipped == len(report.checks)


@pytest.mark.parametrize("suite", ["core", "dim3"])
def test_suite_passes_in_float_mode(suite):
    report = run_suite(suite, mode="float", tol=1e-8)
    assert report.tol == 1e-8
    assert [c.id for c in report.checks if c.status == "fail"] == []


def test_failing_check_is_reported_not_raised():
    def broken(ctx):
        raise ZeroDivisionError("boom")

    result = run_check(Check("broken", "core", "leibniz", None, broken), "exact", 0, 1e-9)
    assert result.status == "fail"
    assert result.detail == "ZeroDivisionError: boom"


def test_expectations():
    ok = run_check(Check("value", "core", "casimir", None, lambda ctx: Fraction(3), Fraction(3)), "exact", 0, 1e-9)
    assert ok.passed and ok.residual == 0
    off = run_check(Check("value", "core", "casimir", None, lambda ctx: 2.5, 2), "float", 0, 1e-9)
    assert off.status == "fail"
    assert off.residual == pytest.approx(0.5)
    nonzero = run_check(Check("nz", "core", "gray-not-proportional", None, lambda ctx: Fraction(1, 2), verify.NONZERO),
                        "exact", 0, 1e-9)
    assert nonzero.passed
    skipped = run_check(Check("only-exact", "core", "commutator", None, lambda ctx: 0, modes=("exact",)),
                        "float", 0, 1e-9)
    assert skipped.status == "skip"


def test_submersion_checks_cover_every_splitting():
    by_id = {c.id: c for c in CHECKS}
    for key, source in verify.SPLITTING_PAIRS:
        tag = f"{verify._slug(verify._key_label(key))}-{source}"
        assert by_id[f"admissible-{tag}"].ref == "admissible"
        assert by_id[f"s4-{tag}"].ref == "s4"
    equivariance = [c.model for c in CHECKS if c.ref == "vertical-equivariance"]
    assert "s3s3" in equivariance and len(equivariance) == 2
    assert by_id["stiefel-mixed-curvature-vanishes"].ref == "mixed-curvature"
    assert by_id["flag-transvection"].expected == (8, True, "negative definite", (8,), True)


@pytest.mark.parametrize("check_id", ["stiefel-mixed-curvature-vanishes", "flag-transvection", "s4-stiefel-n-3-stab"])
def test_added_submersion_checks_pass(check_id):
    check = next(c for c in CHECKS if c.id == check_id)
    result = run_check(check, "exact", 0, 1e-9)
    assert result.passed, result.detail
