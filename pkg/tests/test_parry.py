from fractions import Fraction
import math

import pytest

from gbeta_lab.algebraic import ZBetaRing, all_roots
from gbeta_lab.errors import HypothesisViolation, InsideDisk, IsolationFailure, NotInfinite, OutOfRange
from gbeta_lab.gbeta_map import Expansion, ExpansionStep, GBetaMap, Shape, SignConfiguration
from gbeta_lab.parry import (
    CriterionSequence,
    approximate_inverse_zero,
    build_parry_polynomial,
    check_remainder_bounds,
    criterion_from_pairs,
    criterion_polynomial,
    make_criterion,
    orbit_series,
    parry_polynomial_of,
    parry_zeros,
    scaled_criterion,
    solve_criterion_beta,
    verify_criterion_orbit,
    verify_factor_identity,
    verify_zero_equivalence,
)

GOLDEN = (1 + math.sqrt(5)) / 2


def test_golden_parry_polynomial(golden_classical):
    P = parry_polynomial_of(golden_classical)

    assert P.poly.coeffs == (-1, -1, 1)
    assert (P.preperiod, P.period) == (0, 2)
    assert P.max_digit == 1


def test_golden_tent_parry_polynomial(golden_tent):
    P = parry_polynomial_of(golden_tent)

    assert P.poly.coeffs == (-1, 0, 2, 0, 0, -2, 1)
    assert P.poly(GOLDEN) == pytest.approx(0, abs=1e-12)


def test_integer_parry_polynomials():
    assert parry_polynomial_of(GBetaMap.create(ZBetaRing.of_rational(3), (1, 1, 1))).poly.coeffs == (-3, 1)
    assert parry_polynomial_of(GBetaMap.create(ZBetaRing.of_rational(2), (1, -1))).poly.coeffs == (-2, 1)


def test_preperiodic_parry_polynomial():
    # 1 = 2/β + Σ_{j≥2} β^{-j}
    expansion = Expansion((ExpansionStep(1, 2), ExpansionStep(1, 1)), Shape.eventually_periodic(1, 1))

    P = build_parry_polynomial(expansion)
    assert P.poly.coeffs == (1, -3, 1)
    assert P.to_json()["k"] == 1


def test_parry_polynomial_needs_an_infinite_expansion():
    with pytest.raises(NotInfinite):
        build_parry_polynomial(Expansion((ExpansionStep(1, 2),), Shape.finite()))


def test_parry_zeros_contain_beta(golden_tent):
    zeros = parry_zeros(parry_polynomial_of(golden_tent))

    assert len(zeros) == 6
    assert any(abs(complex(z) - GOLDEN) < 1e-12 for z in zeros)
    assert max(z.modulus for z in zeros) == pytest.approx(GOLDEN)


def test_zero_equivalence(golden_classical):
    P = parry_polynomial_of(golden_classical)

    at_beta = verify_zero_equivalence(P, GOLDEN)
    assert at_beta.lhs_vanishes and at_beta.rhs_vanishes

    elsewhere = verify_zero_equivalence(P, 1.5 + 0.5j)
    assert elsewhere.consistent
    assert not elsewhere.lhs_vanishes

    with pytest.raises(InsideDisk):
        verify_zero_equivalence(P, 0.5)


def test_orbit_series(golden_classical):
    series = orbit_series(golden_classical, 4)

    assert list(series.digits) == [1, 0, 1, 0]
    assert series.c[0] == 1
    assert series.c[1] == pytest.approx(GOLDEN - 1)
    assert series.N == 4


@pytest.mark.parametrize("z", [2.0, 1.2 + 1.1j, -1.5])
def test_factor_identity(golden_tent, z):
    report = verify_factor_identity(golden_tent, z, N=200)

    assert report.holds


def test_factor_identity_inside_disk(golden_tent):
    with pytest.raises(InsideDisk):
        verify_factor_identity(golden_tent, 0.9j)


def test_worked_criterion(worked_criterion):
    c = worked_criterion

    assert c.itinerary == (3, 0, 1)
    assert c.E.entries == (-1, 1, 1, 1)
    assert c.interval == (3, 4)
    assert criterion_polynomial(c).coeffs == (1, -1, -3, 1)


def test_worked_criterion_beta(worked_criterion):
    beta = solve_criterion_beta(worked_criterion)
    assert float(beta) == pytest.approx(3.2143, abs=1e-3)

    report = verify_criterion_orbit(worked_criterion, beta)
    assert len(report.orbit) == 3
    assert report.orbit[0] == report.map.one
    assert (report.orbit[2].times_beta() - 1).is_zero
    assert report.to_json()["criterion"]["M"] == [3, 1, -1]


def test_other_roots_of_the_worked_criterion(worked_criterion):
    reals = sorted(complex(z).real for z in all_roots(criterion_polynomial(worked_criterion)))

    assert reals[0] == pytest.approx(-0.675, abs=1e-2)
    assert reals[1] == pytest.approx(0.461, abs=1e-2)


def test_hypotheses_are_all_reported():
    with pytest.raises(HypothesisViolation) as info:
        make_criterion((3, -2))

    assert len(info.value.clauses) == 3
    assert info.value.M == (3, -2)


def test_bound_and_gap():
    with pytest.raises(HypothesisViolation) as info:
        make_criterion((2, 1))

    text = str(info.value)
    assert "bound" in text
    assert "gap" in text


@pytest.mark.parametrize("M", [(3,), (3, 0), (4, 2, 2), (1, 0)])
def test_malformed_criteria(M):
    with pytest.raises(HypothesisViolation):
        make_criterion(M)


def test_isolation_failure():
    # x^2 - 3x + 2 has its root 2 on the boundary of (2, 3)
    c = CriterionSequence((3, -2), (3, 2), (1, -1), (2, 2), SignConfiguration((1, -1, 1)))

    with pytest.raises(IsolationFailure):
        solve_criterion_beta(c)


def test_criterion_with_a_zero_digit():
    c = criterion_from_pairs([(1, 2), (1, 0), (1, 1)])

    assert c.itinerary == (2, 0, 1)
    assert c.E.entries == (1, 1, 1)

    report = verify_criterion_orbit(c, solve_criterion_beta(c))
    assert report.pcf.period == 3


def test_scaled_criterion():
    assert scaled_criterion((3, 1, -1), 2).M == (6, 2, -2)

    with pytest.raises(ValueError):
        scaled_criterion((3, 1, -1), 0)


def test_remainder_bounds(worked_criterion):
    first = check_remainder_bounds(worked_criterion, 3, 1)
    assert first.value == Fraction(2, 9)
    assert first.passed

    last = check_remainder_bounds(worked_criterion, 4, 2)
    assert last.value == Fraction(-1, 16)
    assert last.passed

    with pytest.raises(OutOfRange):
        check_remainder_bounds(worked_criterion, 5, 1)

    with pytest.raises(OutOfRange):
        check_remainder_bounds(worked_criterion, 3, 3)


def test_inverse_zeros_approach_the_target():
    b = (Fraction(-7, 10), Fraction(3, 10))
    # a zero of 1 - 0.7w + 0.3w^2
    target = complex(7 / 6, math.sqrt(0.71) / 0.6)

    coarse = approximate_inverse_zero(b, target, 2)
    fine = approximate_inverse_zero(b, target, 101)

    assert fine.M == (10, -7, 3)
    assert fine.distance < 1e-3
    assert fine.distance < coarse.distance


def test_inverse_zero_coefficients():
    with pytest.raises(ValueError):
        approximate_inverse_zero((Fraction(1), Fraction(1, 2)), 1j, 2)

    with pytest.raises(ValueError):
        approximate_inverse_zero((Fraction(0), Fraction(1, 2)), 1j, 2)
