"""Generalized Parry polynomials, their analytic identities and the
integer criterion that manufactures generalized Parry numbers."""

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math
from typing import Optional, Sequence, Union

import mpmath
import numpy as np

from gbeta_lab.algebraic import (
    AlgebraicReal,
    ComplexPoint,
    IntPolynomial,
    ZBetaElement,
    ZBetaRing,
    all_roots,
    format_rational,
)
from gbeta_lab.config import (
    DEFAULT_PCF_MAX_STEPS,
    DEFAULT_PRECISION_BITS,
    DEFAULT_SERIES_TERMS,
    FACTOR_ABS_TOL,
    IDENTITY_ABS_TOL,
)
from gbeta_lab.errors import (
    HypothesisViolation,
    InsideDisk,
    InvalidMap,
    IsolationFailure,
    NotInfinite,
    OutOfRange,
    VerificationFailure,
)
from gbeta_lab.gbeta_map import (
    PCF,
    Expansion,
    GBetaMap,
    Shape,
    SignConfiguration,
    Undetermined,
    detect_pcf,
    orbit,
    orbit_cycle,
)
from gbeta_lab.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class ParryPolynomial:
    poly: IntPolynomial
    preperiod: int
    period: int
    expansion: Expansion

    @property
    def degree(self) -> int:
        return self.poly.degree

    @property
    def max_digit(self) -> int:
        return max(step.d for step in self.expansion.steps)

    def to_json(self) -> dict:
        return {
            "coeffs": self.poly.to_json(),
            "k": self.preperiod,
            "p": self.period,
            "expansion": self.expansion.to_json(),
        }


def build_parry_polynomial(exp: Expansion) -> ParryPolynomial:
    if not exp.shape.is_infinite:
        raise NotInfinite(exp.shape)

    k, p = exp.preperiod, exp.period
    n = k + p
    t = exp.signed_digits(n)

    coeffs = [0] * (n + 1)
    coeffs[n] += 1
    for j in range(1, n + 1):
        coeffs[n - j] -= t[j - 1]

    coeffs[k] -= 1
    for j in range(1, k + 1):
        coeffs[k - j] += t[j - 1]

    return ParryPolynomial(IntPolynomial(tuple(coeffs)), k, p, exp)


def parry_polynomial_of(map: GBetaMap, max_steps: int = DEFAULT_PCF_MAX_STEPS) -> ParryPolynomial:
    verdict = detect_pcf(map, max_steps)
    if isinstance(verdict, Undetermined):
        raise NotInfinite(Shape.truncated(max_steps))
    return build_parry_polynomial(verdict.expansion)


def parry_zeros(P: ParryPolynomial, precision: int = DEFAULT_PRECISION_BITS) -> list[ComplexPoint]:
    """Zeros of P_{β,E}; a superset of the Galois conjugates of β."""
    return all_roots(P.poly, precision=precision)


def _modulus(z) -> float:
    return abs(complex(z))


def _series(t: Sequence[int], w: complex) -> complex:
    """1 − Σ t_j w^j by Horner."""
    coeffs = np.concatenate(([1.0], -np.asarray(t, dtype=float)))
    return complex(np.polynomial.polynomial.polyval(w, coeffs))


@dataclass(frozen=True)
class ZeroEquivalenceReport:
    lhs_residual: float
    rhs_residual: float
    tail_bound: float
    tolerance: float

    @property
    def lhs_vanishes(self) -> bool:
        return self.lhs_residual < self.tolerance

    @property
    def rhs_vanishes(self) -> bool:
        return self.rhs_residual < self.tolerance

    @property
    def consistent(self) -> bool:
        return self.lhs_vanishes == self.rhs_vanishes


def verify_zero_equivalence(P: ParryPolynomial, z, N: int = DEFAULT_SERIES_TERMS) -> ZeroEquivalenceReport:
    """P(z) = 0 exactly when 1 − Σ s(j)d(j)z^{-j} = 0, for |z| > 1."""
    point = ComplexPoint.of(z)
    r = point.modulus
    if r <= 1:
        raise InsideDisk(r)

    with mpmath.workprec(point.precision):
        lhs = float(abs(mpmath.polyval(P.poly.descending(), point.to_mpc())))

    rhs = abs(_series(P.expansion.signed_digits(N), 1 / complex(point)))

    tail = (P.max_digit + 1) * r ** (-N) / (1 - 1 / r)
    return ZeroEquivalenceReport(lhs, rhs, tail, 10 * tail + IDENTITY_ABS_TOL)


@dataclass(frozen=True)
class OrbitSeries:
    """Signed digits t_j = s(j)d(j) for j = 1..N and c_j = s(j+1)f^j(1) for j = 0..N."""

    beta: float
    digits: np.ndarray
    c: np.ndarray

    @property
    def N(self) -> int:
        return len(self.digits)


def orbit_series(map: GBetaMap, N: int, max_steps: int = DEFAULT_PCF_MAX_STEPS) -> OrbitSeries:
    cycle = orbit_cycle(map, map.one, max_steps)
    if cycle is not None:
        items = cycle.take(N + 1)
    else:
        items = list(itertools.islice(orbit(map, map.one), N + 1))

    values: dict[tuple, float] = {}
    c = np.empty(N + 1)
    for j, item in enumerate(items):
        if item.point.coords not in values:
            values[item.point.coords] = float(item.point)
        c[j] = item.sign * values[item.point.coords]

    digits = np.array([item.sign * item.digit for item in items[:N]], dtype=float)
    return OrbitSeries(float(map.beta), digits, c)


def signed_orbit_values(map: GBetaMap, N: int) -> np.ndarray:
    return orbit_series(map, N).c


@dataclass(frozen=True)
class FactorIdentityReport:
    lhs: complex
    rhs: complex
    difference: float
    tail_bound: float

    @property
    def holds(self) -> bool:
        return self.difference <= self.tail_bound + FACTOR_ABS_TOL


def verify_factor_identity(
    map: GBetaMap,
    z,
    N: int = DEFAULT_SERIES_TERMS,
    series: Optional[OrbitSeries] = None,
) -> FactorIdentityReport:
    """1 − Σ s(j)d(j)z^{-j} against (1 − β/z)·Σ c_j z^{-j}, both truncated at N."""
    z = complex(ComplexPoint.of(z))
    r = abs(z)
    if r <= 1:
        raise InsideDisk(r)

    if series is None or series.N < N:
        series = orbit_series(map, N)

    w = 1 / z
    lhs = _series(series.digits[:N], w)
    rhs = (1 - series.beta * w) * complex(np.polynomial.polynomial.polyval(w, series.c[: N + 1]))

    # the truncations differ by exactly β·c_N·z^{-N-1}
    tail = series.beta * r ** (-N - 1)
    return FactorIdentityReport(lhs, rhs, abs(lhs - rhs), tail)


@dataclass(frozen=True)
class CriterionSequence:
    M: tuple[int, ...]
    a: tuple[int, ...]
    s: tuple[int, ...]
    itinerary: tuple[int, ...]
    E: SignConfiguration

    @property
    def n(self) -> int:
        return len(self.M)

    @property
    def interval(self) -> tuple[int, int]:
        return self.itinerary[0], self.itinerary[0] + 1

    def to_json(self) -> dict:
        return {
            "M": list(self.M),
            "a": list(self.a),
            "s": list(self.s),
            "itinerary": list(self.itinerary),
            "E": list(self.E),
        }


def _fill_sign(free_signs, k: int) -> int:
    if free_signs is None:
        return 1
    if isinstance(free_signs, int):
        return free_signs
    return free_signs[k] if k < len(free_signs) else 1


def _pair_hypotheses(s: Sequence[int], a: Sequence[int], free_signs) -> tuple[list[str], list[int], list[int]]:
    n = len(a)
    clauses = []

    if s[0] != 1:
        clauses.append("(1) s(1) = +1")

    it = [a[j] if s[j + 1] == s[j] else a[j] - 1 for j in range(n - 1)] + [a[n - 1]]

    low = [j + 1 for j in range(1, n) if it[0] <= a[j]]
    if low:
        clauses.append(f"(1) It(1) > a(j) fails at j = {low}")

    flat = [j + 1 for j in range(n - 1) if a[j] == 0 and s[j + 1] != s[j]]
    if flat:
        clauses.append(f"(3) a(j) = 0 needs s(j+1) = s(j), fails at j = {flat}")

    constraints: dict[int, int] = {}
    for j in range(n - 1):
        k = it[j]
        want = s[j + 1] * s[j]
        if not 0 <= k <= it[0]:
            continue
        if constraints.get(k, want) != want:
            clauses.append(f"(2) no sign configuration: E({k}) must be both +1 and -1")
        constraints.setdefault(k, want)

    E = [constraints.get(k, _fill_sign(free_signs, k)) for k in range(max(it[0], 0) + 1)]
    return clauses, it, E


def _finish(M, s, a, clauses, free_signs) -> CriterionSequence:
    if len(a) < 2:
        clauses = clauses + ["length: n ≥ 2"]
        raise HypothesisViolation(clauses, M)

    pair_clauses, it, E = _pair_hypotheses(s, a, free_signs)
    clauses = clauses + pair_clauses
    if clauses:
        raise HypothesisViolation(clauses, M)

    return CriterionSequence(tuple(M), tuple(a), tuple(s), tuple(it), SignConfiguration(tuple(E)))


def make_criterion(M: Sequence[int], free_signs: Union[None, int, Sequence[int]] = None) -> CriterionSequence:
    """Validate M and derive a, s, It and E; every failed clause is reported."""
    M = tuple(int(v) for v in M)
    if not M:
        raise HypothesisViolation(["length: n ≥ 2"], M)

    clauses = []
    if any(v == 0 for v in M):
        clauses.append("non-zero: M(j) ≠ 0")
    if len(set(M)) != len(M):
        clauses.append("distinct: M(j) pairwise distinct")
    if M[0] < 2:
        clauses.append("leading: M(1) ≥ 2")

    wide = [j + 1 for j in range(1, len(M)) if abs(M[j]) + 1 >= M[0]]
    if wide:
        clauses.append(f"bound: |M(j)| + 1 < M(1) fails at j = {wide}")

    gaps = sorted(
        (j + 1, k + 1)
        for j, k in itertools.product(range(len(M)), repeat=2)
        if abs(M[j]) == abs(M[k]) - 1
    )
    if gaps:
        clauses.append(f"gap: |M(j)| ≠ |M(k)| − 1 fails at (j, k) = {gaps}")

    s = tuple(1 if v > 0 else -1 for v in M)
    a = tuple(abs(v) for v in M)
    return _finish(M, s, a, clauses, free_signs)


def criterion_from_pairs(pairs: Sequence[tuple[int, int]], free_signs: Union[None, int, Sequence[int]] = None) -> CriterionSequence:
    """Criterion data in (s(j), a(j)) form, zero digits allowed; hypotheses (1)-(3) only."""
    s = tuple(int(p[0]) for p in pairs)
    a = tuple(int(p[1]) for p in pairs)
    if any(v not in (1, -1) for v in s) or any(v < 0 for v in a):
        raise HypothesisViolation(["pairs: s(j) = ±1 and a(j) ≥ 0"])

    M = tuple(sign * mag for sign, mag in zip(s, a))
    return _finish(M, s, a, [], free_signs)


def scaled_criterion(M: Sequence[int], p: int) -> CriterionSequence:
    if p < 1:
        raise ValueError("The scale must be a positive integer")
    return make_criterion([p * v for v in M])


def criterion_polynomial(c: CriterionSequence) -> IntPolynomial:
    """x^n − Σ s(j)a(j)x^{n−j}."""
    n = c.n
    coeffs = [0] * (n + 1)
    coeffs[n] = 1
    for j in range(1, n + 1):
        coeffs[n - j] = -c.s[j - 1] * c.a[j - 1]
    return IntPolynomial(tuple(coeffs))


def _interior_roots(q: IntPolynomial, lo: int, hi: int) -> list[AlgebraicReal]:
    roots = []
    for (a, b), _ in q.to_sympy().intervals(inf=lo, sup=hi):
        a = Fraction(int(a.p), int(a.q))
        b = Fraction(int(b.p), int(b.q))
        try:
            root = AlgebraicReal(q, a, b)
        except ValueError as err:
            logger.debug(err)
            continue

        if root.is_exact and root.lo in (lo, hi):
            logger.debug(f"{q} has the endpoint root {format_rational(root.lo)}")
            continue
        roots.append(root)
    return roots


def solve_criterion_beta(c: CriterionSequence) -> AlgebraicReal:
    q = criterion_polynomial(c)
    lo, hi = c.interval
    roots = _interior_roots(q, lo, hi)

    if not roots:
        raise IsolationFailure((lo, hi), f"{q} changes no sign strictly inside")

    if len(roots) == 1:
        return roots[0]

    logger.warning(f"{q} has {len(roots)} roots in ({lo}, {hi}); keeping the one whose orbit checks out")
    for root in roots:
        try:
            verify_criterion_orbit(c, root)
        except VerificationFailure as err:
            logger.debug(err)
            continue
        return root

    raise IsolationFailure((lo, hi), "no candidate root passes the orbit check")


@dataclass(frozen=True)
class CriterionReport:
    criterion: CriterionSequence
    beta: AlgebraicReal
    map: GBetaMap
    orbit: tuple[ZBetaElement, ...]
    pcf: PCF

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion.to_json(),
            "beta": self.beta.to_json(),
            "beta_float": float(self.beta),
            "orbit": [point.to_json() for point in self.orbit],
            "pcf": {"preperiod": self.pcf.preperiod, "period": self.pcf.period},
        }


def verify_criterion_orbit(c: CriterionSequence, beta: AlgebraicReal) -> CriterionReport:
    """Simulate the exact orbit of 1 and check It(k), f^{n-1}(1) = a(n)/β and finiteness."""
    try:
        map = GBetaMap(ZBetaRing(beta), c.E)
    except (InvalidMap, ValueError) as err:
        raise VerificationFailure(0, str(err))

    items = list(itertools.islice(orbit(map, map.one), c.n))
    for k in range(1, c.n):
        branch = items[k - 1].branch
        if branch != c.itinerary[k - 1]:
            raise VerificationFailure(k, f"f^{k - 1}(1) lies in I_{branch}, expected I_{c.itinerary[k - 1]}")

    last = items[c.n - 1].point
    if not (last.times_beta() - c.a[-1]).is_zero:
        raise VerificationFailure(c.n, f"f^{c.n - 1}(1) = {last} is not a(n)/β")

    verdict = detect_pcf(map)
    if isinstance(verdict, Undetermined):
        raise VerificationFailure(c.n, f"orbit of 1 has no repeat within {verdict.max_steps} steps")

    return CriterionReport(c, beta, map, tuple(item.point for item in items), verdict)


@dataclass(frozen=True)
class RemainderReport:
    value: Fraction
    bound: Fraction
    expected_sign: int

    @property
    def magnitude_ok(self) -> bool:
        return abs(self.value) < self.bound

    @property
    def sign_ok(self) -> bool:
        return (self.value > 0) - (self.value < 0) == self.expected_sign

    @property
    def passed(self) -> bool:
        return self.magnitude_ok and self.sign_ok


def check_remainder_bounds(c: CriterionSequence, x: Union[int, Fraction], j: int) -> RemainderReport:
    """R_j(x) = Σ_{i=j}^{n−1} s(i+1)a(i+1)x^{−i}, against 1/x^{j−1} and the sign s(j+1)."""
    x = Fraction(x)
    lo, hi = c.interval
    if not lo <= x <= hi:
        raise OutOfRange(x, lo, hi)
    if not 1 <= j <= c.n - 1:
        raise OutOfRange(j, 1, c.n - 1)

    value = sum((Fraction(c.s[i] * c.a[i]) / x**i for i in range(j, c.n)), Fraction(0))
    return RemainderReport(value, 1 / x ** (j - 1), c.s[j])


@dataclass(frozen=True)
class InverseZeroReport:
    M: tuple[int, ...]
    scale: int
    nearest: complex
    distance: float


def approximate_inverse_zero(b: Sequence[Fraction], lam: complex, p: int) -> InverseZeroReport:
    """Approximate a zero λ of g(w) = 1 + Σ b_j w^j by inverse conjugates of the scaled criterion.

    The b_j must be non-zero rationals in (−1, 1).
    """
    b = [Fraction(v) for v in b]
    if any(not -1 < v < 1 or v == 0 for v in b):
        raise ValueError("Coefficients must be non-zero rationals in (-1, 1)")

    denominator = math.lcm(*(v.denominator for v in b))

    last: Optional[HypothesisViolation] = None
    for multiple in range(1, 17):
        M1 = denominator * multiple
        M = [M1] + [int(v * M1) for v in b]
        try:
            c = scaled_criterion(M, p)
            break
        except HypothesisViolation as err:
            last = err
    else:
        raise last

    zeros = all_roots(criterion_polynomial(c))
    inverses = [1 / complex(z) for z in zeros if complex(z) != 0]
    nearest = min(inverses, key=lambda w: abs(w - lam))
    return InverseZeroReport(tuple(M), p, nearest, abs(nearest - lam))
