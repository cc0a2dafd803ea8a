from fractions import Fraction
import math

import pytest

from gbeta_lab.algebraic import ZBetaRing
from gbeta_lab.errors import InvalidMap, NotExpanding, NotUniform, NotUnimodal, OutOfRange
from gbeta_lab.gbeta_map import GBetaMap
from gbeta_lab.unimodal import (
    NormalFormCase,
    PiecewiseLinearMap,
    conjugate_gap_check,
    entropy_cross_check,
    lap_entropy,
    normalize,
    tent,
    tent_corpus,
)


def test_tent_map(golden):
    f = tent(golden)

    assert f(Fraction(1, 2)) == f.ring.generator / 2
    assert [f.ring.sign(s) for s in f.slopes] == [1, -1]
    assert f.turning_points() == [f.ring.from_rational(Fraction(1, 2))]
    assert f.monotone_signs() == [1, -1]

    with pytest.raises(OutOfRange):
        f(f.ring.from_rational(2))


def test_breakpoints_must_increase():
    with pytest.raises(ValueError):
        PiecewiseLinearMap(ZBetaRing.rational(), [0, 1, Fraction(1, 2)], [0, 1, 0])


def test_from_gbeta_needs_continuity(golden_classical, golden_tent):
    with pytest.raises(InvalidMap):
        PiecewiseLinearMap.from_gbeta(golden_classical)

    f = PiecewiseLinearMap.from_gbeta(golden_tent)
    assert f(f.ring.one) == 2 - f.ring.generator


def test_json_round_trip_keeps_the_ring(golden):
    data = tent(golden).to_json()

    assert "beta" in data
    assert PiecewiseLinearMap.from_json(data).breakpoints == tent(golden).breakpoints


def test_normalize_golden_tent(golden):
    nf = normalize(tent(golden))

    assert nf.case is NormalFormCase.FIRST_FULL_INCREASING
    assert nf.map.E.entries == (1, -1)
    assert nf.core == (nf.map.ring.zero, nf.map.ring.generator / 2)
    assert float(nf.map.beta) == pytest.approx((1 + math.sqrt(5)) / 2)


def test_normalize_rational_tent():
    nf = normalize(PiecewiseLinearMap.from_json({"breakpoints": ["0", "1/2", "1"], "values": ["0", "1", "0"]}))

    assert nf.case is NormalFormCase.FIRST_FULL_INCREASING
    assert float(nf.map.beta) == 2


@pytest.mark.parametrize(
    "signs, case",
    [
        ((1, -1), NormalFormCase.FIRST_FULL_INCREASING),
        ((-1, 1), NormalFormCase.FIRST_FULL_DECREASING),
    ],
)
def test_normal_form_cases(golden_ring, signs, case):
    f = PiecewiseLinearMap.from_gbeta(GBetaMap.create(golden_ring, signs))

    nf = normalize(f)
    assert nf.case is case
    assert nf.map.E.entries == signs

    reflected = normalize(f.reflect())
    assert reflected.conjugacy.reflected
    assert reflected.map.E.entries == signs
    assert reflected.case in (NormalFormCase.SECOND_FULL_DECREASING, NormalFormCase.SECOND_FULL_INCREASING)


def test_conjugacy_preserves_lap_counts(golden_tent):
    f = PiecewiseLinearMap.from_gbeta(golden_tent)

    assert lap_entropy(f.reflect(), 10).laps == lap_entropy(f, 10).laps


def test_normalize_rejects():
    rational = ZBetaRing.rational()

    with pytest.raises(NotUnimodal):
        normalize(PiecewiseLinearMap(rational, [0, Fraction(1, 3), Fraction(2, 3), 1], [0, 1, 0, 1]))

    with pytest.raises(NotUniform):
        normalize(PiecewiseLinearMap(rational, [0, Fraction(1, 4), 1], [0, 1, 0]))

    with pytest.raises(NotExpanding):
        normalize(tent(Fraction(1, 2)))

    with pytest.raises(NotExpanding):
        normalize(tent(3))


def test_full_tent_laps():
    report = lap_entropy(tent(2), 12)

    assert report.laps == tuple(2**n for n in range(13))
    assert report.n == 12
    assert report.estimate == pytest.approx(math.log(2), abs=1e-15)
    assert report.raw == pytest.approx(math.log(2))


def test_lap_entropy_needs_two_steps():
    with pytest.raises(ValueError):
        lap_entropy(tent(2), 1)


def test_golden_tent_entropy(golden):
    nf = normalize(tent(golden))

    check = entropy_cross_check(nf, 16)
    assert check.gap < 1e-2
    assert lap_entropy(tent(golden), 10, domain=nf.core).laps == lap_entropy(PiecewiseLinearMap.from_gbeta(nf.map), 10).laps


def test_tent_corpus():
    maps = tent_corpus(3)

    betas = [float(map.beta) for map in maps]
    assert betas == sorted(betas)
    assert all(1 < beta <= 2 for beta in betas)
    assert all(map.E.entries == (1, -1) for map in maps)
    assert any(beta == pytest.approx((1 + math.sqrt(5)) / 2) for beta in betas)


def test_conjugate_gap(golden):
    report = conjugate_gap_check(normalize(tent(golden)), 0.4)

    assert report.max_nonreal_modulus == pytest.approx(1)
    assert report.passed
    assert not conjugate_gap_check(normalize(tent(golden)), 1.5).passed
