import math

import numpy as np
import pytest

from gbeta_lab.boundary import (
    FPowerSeries,
    boundary_curve,
    certify_minimality,
    endpoint_check,
    endpoint_series,
    evaluate,
    random_series,
    rotation_coefficients,
    series_zeros,
    solve_lambda_phi,
    support_gap,
    zero_lower_bound_check,
)
from gbeta_lab.errors import OutOfRange, OutsideDisk


def test_series_coefficients_are_bounded():
    with pytest.raises(ValueError):
        FPowerSeries([0.5, 1.5])

    T = FPowerSeries([1, -1, 1])
    assert T.is_extremal
    assert not T.with_coefficient(2, 0.5).is_extremal
    assert list(T.polynomial()) == [1, 1, -1, 1]


def test_evaluate_inside_the_disk():
    value = evaluate(FPowerSeries(-np.ones(10)), 0.5)

    assert value.value == pytest.approx(0.5**10)
    assert value.tail == pytest.approx(0.5**10)

    with pytest.raises(OutsideDisk):
        evaluate(FPowerSeries([1.0]), 1.0)


def test_rotation_rule_ties_take_plus_one():
    assert list(rotation_coefficients(math.pi / 2, 0.0, 4)) == [1, 1, -1, 1]


def test_support_gap_changes_sign():
    assert support_gap(0.4, 1.0).value > 0
    assert support_gap(0.9, 1.0).value <= 0


def test_zero_lower_bound():
    T, w = endpoint_series("zero", 40)

    report = zero_lower_bound_check(T, float(w))
    assert report.passed
    assert not report.strict

    with pytest.raises(ValueError):
        zero_lower_bound_check(T, 0.3)


def test_random_series_zeros_stay_outside_half():
    rng = np.random.default_rng(7)
    for _ in range(20):
        T = random_series(rng, 12)
        for z in series_zeros(T):
            assert zero_lower_bound_check(T, z).passed


@pytest.mark.parametrize("which, w", [("zero", 0.5), ("pi", -0.5)])
def test_endpoint_series(which, w):
    T, zero = endpoint_series(which, 40)
    assert float(zero) == w
    assert min(abs(series_zeros(T) - w)) < 1e-9

    report = endpoint_check(which, 40)
    assert report.passed
    assert report.value == report.tail


def test_unknown_endpoint():
    with pytest.raises(ValueError):
        endpoint_series("bogus")


@pytest.mark.parametrize("phi", [0.0, math.pi, 2 * math.pi])
def test_real_axis_angles_are_rejected(phi):
    with pytest.raises(OutOfRange):
        solve_lambda_phi(phi, N=100)


def test_lambda_phi_range():
    solution = solve_lambda_phi(math.pi / 2, N=200)

    assert 0.6 < solution.lam < 0.75
    assert abs(solution.zero) == pytest.approx(solution.lam)
    assert solution.series.is_extremal or solution.anomalous is not None
    assert support_gap(solution.lam, math.pi / 2, 200).value == pytest.approx(0, abs=1e-9)


def test_lambda_phi_closes_the_gap():
    solution = solve_lambda_phi(2.0, N=200, tol=1e-13)

    assert support_gap(solution.lam - 1e-6, 2.0, 200).value > 0
    assert support_gap(solution.lam + 1e-6, 2.0, 200).value < 0

    loose = solve_lambda_phi(2.0, N=200, tol=1e-6)
    assert loose.lam == pytest.approx(solution.lam, abs=2e-6)


def test_lambda_phi_ignores_a_bad_warm_start():
    cold = solve_lambda_phi(1.0, N=200)
    warm = solve_lambda_phi(1.0, N=200, warm=0.9)

    assert warm.lam == pytest.approx(cold.lam, abs=1e-12)


def test_lambda_phi_mirror_symmetry():
    upper = solve_lambda_phi(1.0, N=200)
    lower = solve_lambda_phi(2 * math.pi - 1.0, N=200)

    assert lower.lam == pytest.approx(upper.lam, abs=1e-9)
    assert lower.alpha == pytest.approx(math.pi - upper.alpha, abs=1e-9)


def test_lambda_phi_truncation_settles():
    coarse = solve_lambda_phi(1.3, N=200)
    fine = solve_lambda_phi(1.3, N=400)

    assert fine.lam == pytest.approx(coarse.lam, abs=1e-9)


def test_minimality_certificate():
    solution = solve_lambda_phi(1.0, N=100)

    assert certify_minimality(1.0, solution.lam, N=100)


def test_boundary_curve():
    curve = boundary_curve([1.5, 0.5, 1.0], N=150)

    assert len(curve) == 3
    assert not curve.failures
    assert list(curve.phis) == [0.5, 1.0, 1.5]
    assert curve.lambda_at(1.0) == pytest.approx(curve.samples[1].lam)
    assert curve.lambda_at(0.2) is None
    assert curve.sup_inverse() == pytest.approx(max(1 / s.lam for s in curve.samples))
    assert curve.to_csv().splitlines()[0] == "phi,lambda,alpha,residual,n_trunc"
    assert len(curve.to_json()["samples"]) == 3


def test_boundary_curve_in_parallel():
    grid = [0.4, 0.8, 1.2, 1.6]

    serial = boundary_curve(grid, N=100)
    parallel = boundary_curve(grid, N=100, jobs=2)

    assert parallel.lambdas == pytest.approx(serial.lambdas, abs=1e-9)


def test_boundary_curve_rejects_real_angles():
    with pytest.raises(OutOfRange):
        boundary_curve([0.5, math.pi], N=100)
