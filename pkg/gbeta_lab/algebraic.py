"""Exact arithmetic for real algebraic numbers and for elements of Q[β].

β is carried as an integer polynomial plus a rational isolating interval.
Ring elements are coordinate vectors over the power basis 1, β, …, β^{d-1}
and every sign question is settled exactly: interval evaluation on a
shrinking enclosure of β, backed by a gcd test when the defining polynomial
is reducible.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
import logging
import math
from typing import Iterable, Optional, Sequence, Union

import mpmath
import sympy

from gbeta_lab.config import (
    DEFAULT_PRECISION_BITS,
    GCD_CHECK_WIDTH_BITS,
    INITIAL_ENCLOSURE_BITS,
    ROOT_BASE_STEPS,
    ROOT_INIT_ANGLE,
    ROOT_RETRIES,
    ROOT_STEPS_PER_DEGREE,
)
from gbeta_lab.errors import NonConvergence, RingMismatch
from gbeta_lab.logger import get_logger

logger = get_logger(__name__)
logger.setLevel(logging.WARNING)

Rational = Union[int, Fraction]

_Z = sympy.Symbol("z")


class Ordering(IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1

    @classmethod
    def of(cls, value) -> "Ordering":
        return cls((value > 0) - (value < 0))


def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _normalize(value) -> Rational:
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else value


def _to_sympy_rational(value: Rational) -> sympy.Rational:
    value = Fraction(value)
    return sympy.Rational(value.numerator, value.denominator)


def _from_sympy_rational(value) -> Rational:
    value = sympy.Rational(value)
    return _normalize(Fraction(int(value.p), int(value.q)))


def parse_rational(text: Union[str, Rational]) -> Fraction:
    return Fraction(text)


def format_rational(value: Rational) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _interval_horner(coeffs: Sequence[Rational], lo: Fraction, hi: Fraction):
    """Enclose Σ coeffs[i]·x^i for x in [lo, hi]."""
    acc_lo = acc_hi = Fraction(0)

    for c in reversed(coeffs):
        products = (acc_lo * lo, acc_lo * hi, acc_hi * lo, acc_hi * hi)
        acc_lo = min(products) + c
        acc_hi = max(products) + c

    return acc_lo, acc_hi


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients ascending by degree."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = []
        for c in self.coeffs:
            c = Fraction(c)
            if c.denominator != 1:
                raise ValueError(f"Non-integral coefficient {c}")
            coeffs.append(c.numerator)

        while coeffs and coeffs[-1] == 0:
            coeffs.pop()

        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def monomial(cls, n: int, c: int = 1) -> "IntPolynomial":
        return cls((0,) * n + (c,))

    @classmethod
    def from_sympy(cls, poly: sympy.Poly) -> "IntPolynomial":
        return cls(tuple(int(c) for c in reversed(poly.all_coeffs())))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def is_monic(self) -> bool:
        return self.leading == 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "IntPolynomial") -> "IntPolynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "IntPolynomial") -> "IntPolynomial":
        return self + (-other)

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        if self.is_zero() or other.is_zero():
            return IntPolynomial(())

        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(tuple(out))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def descending(self) -> list[int]:
        return list(reversed(self.coeffs))

    def to_sympy(self) -> sympy.Poly:
        return sympy.Poly(self.descending() or [0], _Z, domain=sympy.ZZ)

    def square_free(self) -> "IntPolynomial":
        if self.degree < 1:
            return self
        return IntPolynomial.from_sympy(self.to_sympy().sqf_part())

    def count_real_roots(self, lo: Rational, hi: Rational) -> int:
        """Distinct real roots in the closed interval [lo, hi]."""
        poly = self.to_sympy().sqf_part()
        return int(poly.count_roots(_to_sympy_rational(lo), _to_sympy_rational(hi)))

    def to_json(self) -> list[str]:
        return [str(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Iterable) -> "IntPolynomial":
        return cls(tuple(int(c) for c in data))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"

        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue

            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            if i == 0:
                body = str(magnitude)
            else:
                power = "z" if i == 1 else f"z^{i}"
                body = power if magnitude == 1 else f"{magnitude}{power}"
            terms.append((sign, body))

        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


@dataclass(frozen=True)
class AlgebraicReal:
    """A real root of `defining`, the only one in [lo, hi]."""

    defining: IntPolynomial
    lo: Fraction
    hi: Fraction
    square_free: Optional[IntPolynomial] = field(default=None, repr=False, compare=False)
    checked: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        lo, hi = Fraction(self.lo), Fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

        if self.defining.degree < 1:
            raise ValueError(f"{self.defining} has no roots")
        if lo > hi:
            raise ValueError(f"Empty interval [{lo}, {hi}]")

        if self.square_free is None:
            object.__setattr__(self, "square_free", self.defining.square_free())

        if self.checked:
            return

        if lo == hi:
            if self.defining(lo) != 0:
                raise ValueError(f"{format_rational(lo)} is not a root of {self.defining}")
        else:
            count = self.defining.count_real_roots(lo, hi)
            if count != 1:
                raise ValueError(
                    f"{self.defining} has {count} real roots in [{format_rational(lo)}, {format_rational(hi)}]"
                )

            if self.defining(lo) == 0:
                object.__setattr__(self, "hi", lo)
            elif self.defining(hi) == 0:
                object.__setattr__(self, "lo", hi)

        object.__setattr__(self, "checked", True)

    @classmethod
    def rational(cls, value: Rational) -> "AlgebraicReal":
        value = Fraction(value)
        poly = IntPolynomial((-value.numerator, value.denominator))
        return cls(poly, value, value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def refine(self, target_width: Rational) -> "AlgebraicReal":
        target = Fraction(target_width)
        if target <= 0:
            raise ValueError("target_width must be positive")

        lo, hi = self.lo, self.hi
        sqf = self.square_free
        sign_lo = _sign(sqf(lo))

        while hi - lo > target:
            mid = (lo + hi) / 2
            value = sqf(mid)

            if value == 0:
                lo = hi = mid
            elif _sign(value) == sign_lo:
                lo = mid
            else:
                hi = mid

        return AlgebraicReal(self.defining, lo, hi, square_free=sqf, checked=True)

    def minimal(self) -> "AlgebraicReal":
        """The same number, defined by its irreducible factor."""
        _, factors = self.defining.to_sympy().factor_list()
        if len(factors) == 1 and factors[0][1] == 1:
            return self

        for factor, _ in factors:
            poly = IntPolynomial.from_sympy(factor)
            if poly.degree < 1:
                continue
            if self.is_exact:
                if poly(self.lo) == 0:
                    return AlgebraicReal(poly, self.lo, self.hi)
            elif poly.count_real_roots(self.lo, self.hi) == 1:
                return AlgebraicReal(poly, self.lo, self.hi)

        raise ValueError(f"No factor of {self.defining} vanishes in [{self.lo}, {self.hi}]")

    def root_index(self) -> int:
        """Position among the real roots of the defining polynomial, counted from below."""
        below = int(self.defining.to_sympy().sqf_part().count_roots(None, _to_sympy_rational(self.lo)))
        return below - 1 if self.defining(self.lo) == 0 else below

    def ceil(self) -> int:
        """Exact ⌈x⌉."""
        x = self
        while True:
            if x.is_exact:
                return math.ceil(x.lo)

            if math.ceil(x.lo) == math.ceil(x.hi):
                return math.ceil(x.hi)

            for n in range(math.floor(x.lo) + 1, math.ceil(x.hi)):
                if self.defining(n) == 0:
                    return n

            x = x.refine(x.width / 2)

    def to_mpf(self, bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
        x = self.refine(Fraction(1, 2 ** (bits + 8)))
        mid = (x.lo + x.hi) / 2
        with mpmath.workprec(bits):
            return mpmath.mpf(mid.numerator) / mid.denominator

    def __float__(self) -> float:
        x = self.refine(Fraction(1, 2**60))
        return float((x.lo + x.hi) / 2)

    def to_json(self) -> dict:
        return {
            "poly": self.defining.to_json(),
            "lo": format_rational(self.lo),
            "hi": format_rational(self.hi),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AlgebraicReal":
        return cls(IntPolynomial.from_json(data["poly"]), Fraction(data["lo"]), Fraction(data["hi"]))

    def __str__(self) -> str:
        return f"root of {self.defining} in [{format_rational(self.lo)}, {format_rational(self.hi)}]"


def refine(x: AlgebraicReal, target_width: Rational) -> AlgebraicReal:
    return x.refine(target_width)


class ZBetaRing:
    """Q[β] as coordinate vectors reduced by the defining polynomial of β.

    β is first cut down to its irreducible factor. Degree one covers
    rational β (and the plain rationals, with β = 1); every higher degree
    needs a monic defining polynomial.
    """

    def __init__(self, beta: AlgebraicReal):
        # coordinates are only canonical modulo the minimal polynomial
        beta = beta.minimal()
        defining = beta.defining
        if defining.degree > 1 and not defining.is_monic:
            raise ValueError(f"Defining polynomial {defining} must be monic")

        self.beta = beta
        self.defining = defining
        self.degree = defining.degree
        self.root_index = beta.root_index()

        self._rational_root: Optional[Fraction] = None
        if self.degree == 1:
            self._rational_root = Fraction(-defining.coeffs[0], defining.coeffs[1])

        self._enclosure: Optional[AlgebraicReal] = None
        self._powers: dict[int, mpmath.mpf] = {}

    @classmethod
    def rational(cls) -> "ZBetaRing":
        return cls(AlgebraicReal.rational(1))

    @classmethod
    def of_rational(cls, value: Rational) -> "ZBetaRing":
        return cls(AlgebraicReal.rational(value))

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, ZBetaRing):
            return NotImplemented
        return self.defining == other.defining and self.root_index == other.root_index

    def __hash__(self) -> int:
        return hash(self.defining)

    def __repr__(self) -> str:
        return f"ZBetaRing({self.beta})"

    def _reduce(self, coeffs: Sequence[Rational]) -> tuple:
        if self.degree == 1:
            value = Fraction(0)
            for c in reversed(coeffs):
                value = value * self._rational_root + c
            return (_normalize(value),)

        d = self.degree
        low = self.defining.coeffs[:-1]
        work = [Fraction(c) for c in coeffs]

        for i in range(len(work) - 1, d - 1, -1):
            t = work[i]
            if t:
                for j in range(d):
                    work[i - d + j] -= t * low[j]
            work[i] = 0

        work = work[:d] + [0] * (d - len(work))
        return tuple(_normalize(c) for c in work)

    def element(self, coords: Sequence[Rational]) -> "ZBetaElement":
        return ZBetaElement(self._reduce(coords), self)

    def from_rational(self, value: Rational) -> "ZBetaElement":
        return self.element((value,))

    @property
    def zero(self) -> "ZBetaElement":
        return self.from_rational(0)

    @property
    def one(self) -> "ZBetaElement":
        return self.from_rational(1)

    @property
    def generator(self) -> "ZBetaElement":
        return self.element((0, 1))

    def coerce(self, value) -> "ZBetaElement":
        if isinstance(value, ZBetaElement):
            if value.ring != self:
                raise RingMismatch()
            return value
        if isinstance(value, (int, Fraction)):
            return self.from_rational(value)
        raise TypeError(f"Cannot coerce {value!r} into {self}")

    def _tighten(self) -> AlgebraicReal:
        if self._enclosure is None:
            self._enclosure = self.beta.refine(Fraction(1, 2**INITIAL_ENCLOSURE_BITS))
        else:
            width = self._enclosure.width
            if width > 0:
                self._enclosure = self._enclosure.refine(min(width**2, width / 2**32))
        return self._enclosure

    def enclose(self, x: "ZBetaElement") -> tuple[Fraction, Fraction]:
        if self.degree == 1:
            value = Fraction(x.coords[0])
            return value, value

        enclosure = self._enclosure or self._tighten()
        return _interval_horner(x.coords, enclosure.lo, enclosure.hi)

    def _vanishes(self, x: "ZBetaElement") -> bool:
        enclosure = self._enclosure
        poly = sympy.Poly([_to_sympy_rational(c) for c in reversed(x.coords)], _Z, domain=sympy.QQ)
        g = sympy.gcd(poly, self.defining.to_sympy().set_domain(sympy.QQ))

        if g.degree() < 1:
            return False

        count = g.count_roots(_to_sympy_rational(enclosure.lo), _to_sympy_rational(enclosure.hi))
        if count:
            logger.debug(f"{x} vanishes at β through the factor {g.as_expr()}")
        return count > 0

    def sign(self, x: "ZBetaElement") -> int:
        if x.is_zero:
            return 0
        if self.degree == 1:
            return _sign(x.coords[0])

        enclosure = self._enclosure or self._tighten()
        gcd_checked = False

        while True:
            lo, hi = _interval_horner(x.coords, enclosure.lo, enclosure.hi)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            if enclosure.is_exact:
                return _sign(lo)

            if not gcd_checked and enclosure.width < Fraction(1, 2**GCD_CHECK_WIDTH_BITS):
                gcd_checked = True
                if self._vanishes(x):
                    return 0

            enclosure = self._tighten()

    def compare(self, x: "ZBetaElement", y: "ZBetaElement") -> Ordering:
        if x.ring != y.ring:
            raise RingMismatch()
        if x.coords == y.coords:
            return Ordering.EQUAL
        return Ordering.of(self.sign(x - y))

    def ceil(self, x: "ZBetaElement") -> int:
        """Exact ⌈x⌉ of the real number x."""
        lo, hi = self.enclose(x)
        n = math.ceil((lo + hi) / 2)

        while self.sign(x - n) > 0:
            n += 1
        while self.sign(x - (n - 1)) <= 0:
            n -= 1
        return n

    def inverse(self, x: "ZBetaElement") -> "ZBetaElement":
        if x.is_zero:
            raise ZeroDivisionError("Inverse of zero in Q[β]")

        if self.degree == 1:
            return self.from_rational(1 / Fraction(x.coords[0]))

        poly = sympy.Poly([_to_sympy_rational(c) for c in reversed(x.coords)], _Z, domain=sympy.QQ)
        modulus = self.defining.to_sympy().set_domain(sympy.QQ)
        try:
            inv = poly.invert(modulus)
        except sympy.polys.polyerrors.NotInvertible:
            raise ZeroDivisionError(f"{x} shares a factor with {self.defining}")

        return self.element([_from_sympy_rational(c) for c in reversed(inv.all_coeffs())])

    def beta_mpf(self, bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
        if bits not in self._powers:
            if self._rational_root is not None:
                with mpmath.workprec(bits):
                    self._powers[bits] = mpmath.mpf(self._rational_root.numerator) / self._rational_root.denominator
            else:
                self._powers[bits] = self.beta.to_mpf(bits)
        return self._powers[bits]

    def to_mpf(self, x: "ZBetaElement", bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
        if self.degree == 1:
            value = Fraction(x.coords[0])
            with mpmath.workprec(bits):
                return mpmath.mpf(value.numerator) / value.denominator

        beta = self.beta_mpf(bits)
        with mpmath.workprec(bits):
            acc = mpmath.mpf(0)
            for c in reversed(x.coords):
                c = Fraction(c)
                acc = acc * beta + mpmath.mpf(c.numerator) / c.denominator
            return acc

    def to_float(self, x: "ZBetaElement") -> float:
        return float(self.to_mpf(x, 64))


@dataclass(frozen=True, eq=False)
class ZBetaElement:
    """Σ coords[i]·β^i, exactly."""

    coords: tuple
    ring: ZBetaRing = field(repr=False)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.from_rational(other)
        if not isinstance(other, ZBetaElement):
            return NotImplemented
        return self.ring == other.ring and self.coords == other.coords

    def __hash__(self) -> int:
        return hash(self.coords)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    def _other(self, other) -> "ZBetaElement":
        return self.ring.coerce(other)

    def __add__(self, other) -> "ZBetaElement":
        other = self._other(other)
        return ZBetaElement(tuple(_normalize(Fraction(a) + b) for a, b in zip(self.coords, other.coords)), self.ring)

    __radd__ = __add__

    def __neg__(self) -> "ZBetaElement":
        return ZBetaElement(tuple(-c for c in self.coords), self.ring)

    def __sub__(self, other) -> "ZBetaElement":
        return self + (-self._other(other))

    def __rsub__(self, other) -> "ZBetaElement":
        return self._other(other) - self

    def __mul__(self, other) -> "ZBetaElement":
        if isinstance(other, (int, Fraction)):
            return ZBetaElement(tuple(_normalize(Fraction(c) * other) for c in self.coords), self.ring)

        other = self._other(other)
        out = [Fraction(0)] * (len(self.coords) + len(other.coords) - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    out[i + j] += Fraction(a) * b
        return self.ring.element(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ZBetaElement":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * self.ring.inverse(self._other(other))

    def __rtruediv__(self, other) -> "ZBetaElement":
        return self._other(other) * self.ring.inverse(self)

    def times_beta(self) -> "ZBetaElement":
        if self.ring.degree == 1:
            return self * self.ring._rational_root
        return self.ring.element((0,) + self.coords)

    def compare(self, other) -> Ordering:
        return self.ring.compare(self, self._other(other))

    def __lt__(self, other) -> bool:
        return self.compare(other) < 0

    def __le__(self, other) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other) -> bool:
        return self.compare(other) >= 0

    def to_mpf(self, bits: int = DEFAULT_PRECISION_BITS) -> mpmath.mpf:
        return self.ring.to_mpf(self, bits)

    def __float__(self) -> float:
        return self.ring.to_float(self)

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coords]

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            power = "" if i == 0 else ("β" if i == 1 else f"β^{i}")
            if power and c == 1:
                terms.append(power)
            elif power and c == -1:
                terms.append(f"-{power}")
            else:
                terms.append(f"{format_rational(c)}{power}")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"


def compare(x: ZBetaElement, y: ZBetaElement) -> Ordering:
    return x.ring.compare(x, y)


@dataclass(frozen=True)
class ComplexPoint:
    re: mpmath.mpf
    im: mpmath.mpf
    precision: int = DEFAULT_PRECISION_BITS

    def __post_init__(self):
        with mpmath.workprec(self.precision):
            re, im = mpmath.mpf(self.re), mpmath.mpf(self.im)
        if not (mpmath.isfinite(re) and mpmath.isfinite(im)):
            raise ValueError(f"Non-finite point {re} + {im}i")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def of(cls, value, precision: int = DEFAULT_PRECISION_BITS) -> "ComplexPoint":
        if isinstance(value, ComplexPoint):
            return value
        with mpmath.workprec(precision):
            z = mpmath.mpc(value)
        return cls(z.real, z.imag, precision)

    def to_mpc(self) -> mpmath.mpc:
        with mpmath.workprec(self.precision):
            return mpmath.mpc(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @property
    def modulus(self) -> float:
        return float(mpmath.hypot(self.re, self.im))

    @property
    def angle(self) -> float:
        return float(mpmath.atan2(self.im, self.re))

    def is_real(self, tol: float) -> bool:
        return abs(float(self.im)) <= tol * max(1.0, abs(float(self.re)))


def _circle_start(poly: IntPolynomial, bits: int) -> list:
    n = poly.degree
    lead = abs(poly.leading)
    radius = 1 + max(Fraction(abs(c), lead) for c in poly.coeffs[:-1])
    with mpmath.workprec(bits):
        r = mpmath.mpf(radius.numerator) / radius.denominator
        return [r * mpmath.expj(2 * mpmath.pi * k / n + ROOT_INIT_ANGLE) for k in range(n)]


def _residual_ok(poly: IntPolynomial, roots: list, eps) -> bool:
    coeffs = poly.descending()
    for z in roots:
        scale = sum(abs(c) * abs(z) ** i for i, c in enumerate(poly.coeffs))
        if abs(mpmath.polyval(coeffs, z)) > eps * max(scale, 1):
            return False
    return True


def _simultaneous_roots(poly: IntPolynomial, bits: int, retries: int, eps: float, steps: Optional[int] = None) -> list[ComplexPoint]:
    if poly.degree == 1:
        root = Fraction(-poly.coeffs[0], poly.coeffs[1])
        with mpmath.workprec(bits):
            value = mpmath.mpf(root.numerator) / root.denominator
        return [ComplexPoint(value, mpmath.mpf(0), bits)]

    if steps is None:
        steps = ROOT_BASE_STEPS + ROOT_STEPS_PER_DEGREE * poly.degree
    radius = 1 + max(abs(c) for c in poly.coeffs[:-1]) / abs(poly.leading)

    for attempt in range(retries + 1):
        with mpmath.workprec(bits):
            try:
                roots, err = mpmath.polyroots(
                    poly.descending(),
                    maxsteps=steps,
                    cleanup=True,
                    extraprec=bits,
                    error=True,
                    roots_init=_circle_start(poly, bits),
                )
                converged = err <= eps * radius and _residual_ok(poly, roots, eps)
            except mpmath.mp.NoConvergence:
                converged = False

            if converged:
                return [ComplexPoint(mpmath.mpc(z).real, mpmath.mpc(z).imag, bits) for z in roots]

        logger.info(
            "Durand-Kerner stalled on degree %d at %d bits, %d steps (attempt %d)",
            poly.degree,
            bits,
            steps,
            attempt + 1,
        )
        if attempt < retries:
            bits *= 2
            steps *= 2

    raise NonConvergence(poly.degree, bits, steps)


def all_roots(
    p: IntPolynomial,
    eps: Optional[float] = None,
    precision: int = DEFAULT_PRECISION_BITS,
    retries: int = ROOT_RETRIES,
    steps: Optional[int] = None,
) -> list[ComplexPoint]:
    """All complex roots of `p`, repeated by multiplicity.

    Each square-free factor is solved by simultaneous (Durand-Kerner)
    iteration from a deterministic circle of Cauchy-bound radius. A factor
    whose roots miss |q(z)| ≤ eps·Σ|q_i||z|^i is solved again at twice the
    precision and step budget, up to `retries` times, before
    NonConvergence is raised.
    """
    if p.degree < 1:
        raise ValueError("all_roots needs a polynomial of degree at least 1")

    if eps is None:
        eps = 2.0 ** (-precision // 2)

    _, factors = p.to_sympy().sqf_list()

    roots: list[ComplexPoint] = []
    for factor, multiplicity in factors:
        factor = IntPolynomial.from_sympy(factor)
        if factor.degree < 1:
            continue
        for z in _simultaneous_roots(factor, precision, retries, eps, steps):
            roots.extend([z] * multiplicity)

    return sorted(roots, key=lambda z: (float(z.re), float(z.im)))
