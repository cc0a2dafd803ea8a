from fractions import Fraction

import pytest

from gbeta_lab.algebraic import AlgebraicReal, IntPolynomial, ZBetaRing
from gbeta_lab.gbeta_map import GBetaMap
from gbeta_lab.parry import make_criterion


@pytest.fixture
def golden() -> AlgebraicReal:
    return AlgebraicReal(IntPolynomial((-1, -1, 1)), Fraction(1), Fraction(2))


@pytest.fixture
def golden_ring(golden) -> ZBetaRing:
    return ZBetaRing(golden)


@pytest.fixture
def golden_classical(golden_ring) -> GBetaMap:
    return GBetaMap.create(golden_ring, (1, 1))


@pytest.fixture
def golden_tent(golden_ring) -> GBetaMap:
    return GBetaMap.create(golden_ring, (1, -1))


@pytest.fixture
def worked_criterion():
    return make_criterion((3, 1, -1))
