from fractions import Fraction

import pytest

from gbeta_lab.algebraic import AlgebraicReal, ComplexPoint, IntPolynomial, Ordering, ZBetaRing, all_roots
from gbeta_lab.errors import NonConvergence, RingMismatch


def test_polynomial_trims_and_prints():
    p = IntPolynomial((-1, -1, 1, 0, 0))

    assert p.coeffs == (-1, -1, 1)
    assert p.degree == 2
    assert p.is_monic
    assert str(p) == "z^2 - z - 1"
    assert p(2) == 1
    assert p(Fraction(1, 2)) == Fraction(-5, 4)


def test_polynomial_arithmetic():
    p = IntPolynomial((-1, 1))
    q = IntPolynomial((1, 1))

    assert (p * q).coeffs == (-1, 0, 1)
    assert (p + q).coeffs == (0, 2)
    assert (p - p).is_zero()
    assert IntPolynomial((1, 2, 3)).derivative().coeffs == (2, 6)


def test_polynomial_rejects_fractions():
    with pytest.raises(ValueError):
        IntPolynomial((Fraction(1, 2), 1))


def test_golden_mean(golden):
    assert float(golden) == pytest.approx(1.6180339887498949)
    assert golden.ceil() == 2
    assert not golden.is_exact


def test_ceil_finds_integer_roots():
    beta = AlgebraicReal(IntPolynomial((-4, 0, 1)), 1, 3)

    assert beta.ceil() == 2


def test_rational_beta():
    beta = AlgebraicReal.rational(Fraction(5, 2))

    assert beta.is_exact
    assert beta.ceil() == 3
    assert float(beta) == 2.5


def test_interval_must_isolate_one_root():
    with pytest.raises(ValueError):
        AlgebraicReal(IntPolynomial((-1, 0, 1)), -2, 2)

    with pytest.raises(ValueError):
        AlgebraicReal(IntPolynomial((-1, 0, 1)), 2, 1)


def test_refine_keeps_the_root(golden):
    refined = golden.refine(Fraction(1, 2**40))

    assert refined.width <= Fraction(1, 2**40)
    assert Fraction(16180339887, 10**10) < refined.lo <= refined.hi < Fraction(16180339888, 10**10)


def test_minimal_drops_extra_factors():
    # (z^2 - z - 1)(z - 3)
    beta = AlgebraicReal(IntPolynomial((3, 2, -4, 1)), Fraction(3, 2), 2)

    assert beta.minimal().defining.coeffs == (-1, -1, 1)
    assert float(beta.minimal()) == pytest.approx(float(beta))


def test_ring_reduces_by_the_defining_polynomial(golden_ring):
    b = golden_ring.generator

    assert b * b == golden_ring.element((1, 1))
    assert (b * b - b - 1).is_zero
    assert b.times_beta() == b * b


def test_ring_inverse(golden_ring):
    b = golden_ring.generator

    assert golden_ring.inverse(b) == golden_ring.element((-1, 1))
    assert (1 / b) * b == golden_ring.one

    with pytest.raises(ZeroDivisionError):
        golden_ring.inverse(golden_ring.zero)


def test_exact_comparisons(golden_ring):
    b = golden_ring.generator

    assert b > 1
    assert b < 2
    assert (b * b).compare(b + 1) == Ordering.EQUAL
    assert golden_ring.sign(b - Fraction(8, 5)) == 1
    assert golden_ring.sign(b - Fraction(13, 8)) == -1
    assert golden_ring.ceil(b * 3) == 5


def test_rational_coordinates(golden_ring):
    x = golden_ring.from_rational(Fraction(3, 10))

    assert float(x) == pytest.approx(0.3)
    assert x.to_json() == ["3/10", "0"]


def test_non_monic_rings_are_rejected():
    beta = AlgebraicReal(IntPolynomial((-3, 0, 2)), 1, 2)

    with pytest.raises(ValueError):
        ZBetaRing(beta)


def test_elements_of_different_rings_do_not_mix(golden_ring):
    sqrt2 = ZBetaRing(AlgebraicReal(IntPolynomial((-2, 0, 1)), 1, 2))

    with pytest.raises(RingMismatch):
        golden_ring.generator + sqrt2.generator


def test_refined_beta_keeps_its_ring(golden, golden_ring):
    refined = ZBetaRing(golden.refine(Fraction(1, 2**20)))

    assert refined == golden_ring
    assert golden_ring.generator + refined.generator == golden_ring.element((0, 2))


def test_conjugate_root_is_another_ring(golden_ring):
    conjugate = ZBetaRing(AlgebraicReal(IntPolynomial((-1, -1, 1)), -1, 0))

    assert conjugate.root_index == 0
    assert golden_ring.root_index == 1
    assert conjugate != golden_ring
    with pytest.raises(RingMismatch):
        golden_ring.generator + conjugate.generator


def test_all_roots_sorted():
    roots = all_roots(IntPolynomial((-1, -1, 1)))

    assert [complex(z).real for z in roots] == pytest.approx([-0.6180339887498949, 1.6180339887498949])
    assert all(z.is_real(1e-12) for z in roots)


def test_all_roots_repeats_multiple_roots():
    roots = all_roots(IntPolynomial((1, -2, 1)))

    assert len(roots) == 2
    assert all(complex(z) == pytest.approx(1) for z in roots)


def test_all_roots_complex_pair():
    roots = all_roots(IntPolynomial((1, 0, 1)))

    assert sorted(complex(z).imag for z in roots) == pytest.approx([-1, 1])
    assert all(z.modulus == pytest.approx(1) for z in roots)


def test_all_roots_gives_up_after_retries():
    with pytest.raises(NonConvergence) as info:
        all_roots(IntPolynomial((-1, -1, 0, 1)), retries=1, steps=1)

    assert info.value.degree == 3
    assert info.value.steps == 2
    assert info.value.precision == 256


def test_all_roots_with_an_explicit_step_budget():
    roots = all_roots(IntPolynomial((-1, -1, 0, 1)), retries=0, steps=500)

    assert len(roots) == 3
    assert max(z.modulus for z in roots) == pytest.approx(1.324717957244746)


def test_all_roots_needs_a_root():
    with pytest.raises(ValueError):
        all_roots(IntPolynomial((3,)))


def test_complex_point():
    z = ComplexPoint.of(3 + 4j)

    assert z.modulus == pytest.approx(5)
    assert not z.is_real(1e-12)
    assert ComplexPoint.of(2.0).is_real(1e-12)
