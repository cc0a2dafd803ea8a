from dataclasses import replace

import pytest

from gbeta_lab.verify import (
    SUITES,
    SuiteReport,
    SuiteSizes,
    boundary_suite,
    bounds_suite,
    criterion_suite,
    identities_suite,
    suite_names,
    unimodal_suite,
)

TINY = SuiteSizes(
    criteria=4,
    words=3,
    factor_points=2,
    random_series=20,
    star_triples=10,
    grid_points=4,
    truncation=200,
    tent_period=3,
    envelope_sources=10,
)


def test_suite_report():
    report = SuiteReport("demo")
    report.check(True, "fine")
    report.check(False, "broken")

    assert report.checks == 2
    assert not report.passed
    assert report.failures == ["broken"]
    assert str(report) == "demo: 2 checks, 1 failure(s)"
    assert report.to_json()["passed"] is False


def test_suite_names():
    assert suite_names("all") == SUITES
    assert suite_names("bounds") == ("bounds",)

    with pytest.raises(ValueError):
        suite_names("bogus")


def test_quick_sizes_are_smaller():
    quick, full = SuiteSizes.of(True), SuiteSizes.of(False)

    assert quick.criteria < full.criteria
    assert quick.truncation <= full.truncation
    assert full.envelope_sources == 10_000


def test_criterion_suite():
    report = criterion_suite(TINY, 0)

    assert report.passed, report.failures
    assert report.checks > 0


def test_identities_suite():
    report = identities_suite(TINY, 1)

    assert report.passed, report.failures


def test_bounds_suite():
    report = bounds_suite(TINY, 2)

    assert report.passed, report.failures


def test_unimodal_suite():
    report = unimodal_suite(TINY, 0)

    assert report.passed, report.failures


def test_boundary_suite():
    report = boundary_suite(replace(TINY, grid_points=12), 3)

    assert report.passed, report.failures
    assert 0 < report.metrics["envelope_sources"] <= 10
    assert report.metrics["sup_inverse"] < 1.7
    assert report.metrics["lambda_near_pi"] == pytest.approx(0.6491, abs=0.015)
