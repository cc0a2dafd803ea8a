"""Continuous piecewise-linear interval maps, the normal form of PCF
unimodal uniform expanders as generalized β-transformations, and topological
entropy from lap counts."""

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
import itertools
import math
from typing import Optional, Sequence, Union

from gbeta_lab.algebraic import AlgebraicReal, ZBetaElement, ZBetaRing, parse_rational
from gbeta_lab.config import DEFAULT_LAP_STEPS, LAP_INTERVAL_CAP, TRIM_MAX_STEPS
from gbeta_lab.errors import (
    ExplodedBreakpointCount,
    InvalidMap,
    NotExpanding,
    NotPostCriticallyFinite,
    NotUniform,
    NotUnimodal,
    OutOfRange,
)
from gbeta_lab.gbeta_map import (
    Expansion,
    ExpansionStep,
    GBetaMap,
    Shape,
    SignConfiguration,
    Undetermined,
    canonical_period,
    detect_pcf,
)
from gbeta_lab.logger import get_logger
from gbeta_lab.parry import build_parry_polynomial, parry_polynomial_of, parry_zeros
from gbeta_lab.utils import timed

logger = get_logger(__name__)

Interval = tuple[ZBetaElement, ZBetaElement]


def _coerce(ring: ZBetaRing, value) -> ZBetaElement:
    if isinstance(value, ZBetaElement):
        return value
    if isinstance(value, (list, tuple)):
        return ring.element([parse_rational(v) for v in value])
    return ring.from_rational(parse_rational(value))


class PiecewiseLinearMap:
    """The continuous map interpolating `values` at the increasing `breakpoints`."""

    def __init__(self, ring: ZBetaRing, breakpoints: Sequence, values: Sequence):
        if len(breakpoints) != len(values):
            raise ValueError("Need one value per breakpoint")
        if len(breakpoints) < 2:
            raise ValueError("Need at least two breakpoints")

        self.ring = ring
        self.breakpoints = tuple(_coerce(ring, b) for b in breakpoints)
        self.values = tuple(_coerce(ring, v) for v in values)

        for left, right in zip(self.breakpoints, self.breakpoints[1:]):
            if not left < right:
                raise ValueError(f"Breakpoints must increase, got {left} then {right}")

        self.slopes = tuple(
            (v1 - v0) / (b1 - b0)
            for (b0, b1), (v0, v1) in zip(
                zip(self.breakpoints, self.breakpoints[1:]),
                zip(self.values, self.values[1:]),
            )
        )
        self.slope_signs = tuple(ring.sign(s) for s in self.slopes)

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseLinearMap":
        """{"breakpoints": [...], "values": [...]} with rationals, or coordinate lists over "beta"."""
        if "beta" in data:
            ring = ZBetaRing(AlgebraicReal.from_json(data["beta"]))
        else:
            ring = ZBetaRing.rational()
        return cls(ring, data["breakpoints"], data["values"])

    def to_json(self) -> dict:
        data = {
            "breakpoints": [b.to_json() for b in self.breakpoints],
            "values": [v.to_json() for v in self.values],
        }
        if self.ring.degree > 1 or self.ring.beta.lo != 1:
            data["beta"] = self.ring.beta.to_json()
        return data

    @classmethod
    def from_gbeta(cls, map: GBetaMap) -> "PiecewiseLinearMap":
        ring = map.ring
        inverse = ring.inverse(ring.generator)

        breakpoints = [ring.from_rational(k) * inverse for k in range(map.m + 1)] + [ring.one]
        values = []
        for k, b in enumerate(breakpoints[:-1]):
            values.append(ring.zero if map.E[k] == 1 else ring.one)
            if k > 0:
                # the left branch ends at the same point
                left = ring.one if map.E[k - 1] == 1 else ring.zero
                if left != values[-1]:
                    raise InvalidMap(f"{map} is not continuous at {k}/β")

        last = ring.generator - map.m if map.E[map.m] == 1 else (map.m + 1) - ring.generator
        values.append(last)
        return cls(ring, breakpoints, values)

    @property
    def domain(self) -> Interval:
        return self.breakpoints[0], self.breakpoints[-1]

    def __call__(self, x: ZBetaElement) -> ZBetaElement:
        x = self.ring.coerce(x)
        lo, hi = self.domain
        if x < lo or x > hi:
            raise OutOfRange(float(x), float(lo), float(hi))

        for i in range(len(self.slopes)):
            if x <= self.breakpoints[i + 1]:
                return self.values[i] + self.slopes[i] * (x - self.breakpoints[i])
        return self.values[-1]

    def turning_points(self) -> list[ZBetaElement]:
        points = []
        for i in range(1, len(self.slopes)):
            if self.slope_signs[i] * self.slope_signs[i - 1] < 0:
                points.append(self.breakpoints[i])
        return points

    def monotone_signs(self) -> list[int]:
        """Sign of each lap of f, left to right."""
        return [sign for sign, _ in itertools.groupby(self.slope_signs)]

    def image(self, lo: ZBetaElement, hi: ZBetaElement) -> Interval:
        candidates = [self(lo), self(hi)] + [self(t) for t in self.turning_points() if lo < t < hi]
        return min(candidates), max(candidates)

    def reflect(self) -> "PiecewiseLinearMap":
        """x ↦ 1 − f(1 − x) on [0, 1]."""
        breakpoints = [1 - b for b in reversed(self.breakpoints)]
        values = [1 - v for v in reversed(self.values)]
        return PiecewiseLinearMap(self.ring, breakpoints, values)

    def __str__(self) -> str:
        points = ", ".join(f"({b}, {v})" for b, v in zip(self.breakpoints, self.values))
        return f"PL[{points}]"


def tent(slope: Union[AlgebraicReal, ZBetaRing, Fraction, int]) -> PiecewiseLinearMap:
    """The symmetric tent map x ↦ λ·min(x, 1 − x) on [0, 1]."""
    if isinstance(slope, ZBetaRing):
        ring = slope
    elif isinstance(slope, AlgebraicReal):
        ring = ZBetaRing(slope)
    else:
        ring = ZBetaRing.of_rational(slope)

    half = Fraction(1, 2)
    return PiecewiseLinearMap(ring, [0, half, 1], [ring.zero, ring.generator * half, ring.zero])


class NormalFormCase(IntEnum):
    FIRST_FULL_INCREASING = 1
    FIRST_FULL_DECREASING = 2
    SECOND_FULL_DECREASING = 3
    SECOND_FULL_INCREASING = 4


@dataclass(frozen=True)
class Conjugacy:
    """π(x) = (x − offset)/scale, followed by x ↦ 1 − x when reflected."""

    offset: ZBetaElement
    scale: ZBetaElement
    reflected: bool = False

    def apply(self, x: ZBetaElement) -> ZBetaElement:
        y = (x - self.offset) / self.scale
        return 1 - y if self.reflected else y

    def invert(self, y: ZBetaElement) -> ZBetaElement:
        if self.reflected:
            y = 1 - y
        return self.offset + self.scale * y

    def to_json(self) -> dict:
        return {"offset": self.offset.to_json(), "scale": self.scale.to_json(), "reflected": self.reflected}


@dataclass(frozen=True)
class NormalForm:
    map: GBetaMap
    conjugacy: Conjugacy
    case: NormalFormCase
    core: Interval

    def to_json(self) -> dict:
        return {
            "beta": self.map.beta.to_json(),
            "beta_float": float(self.map.beta),
            "E": list(self.map.E),
            "case": int(self.case),
            "core": [self.core[0].to_json(), self.core[1].to_json()],
            "conjugacy": self.conjugacy.to_json(),
        }


def _uniform_slope(g: PiecewiseLinearMap) -> ZBetaElement:
    slopes = [s if g.ring.sign(s) > 0 else -s for s in g.slopes]
    if any(s != slopes[0] for s in slopes[1:]):
        raise NotUniform(f"Slopes of {g} differ in absolute value")

    lam = slopes[0]
    if lam <= 1:
        raise NotExpanding(f"Slope {lam} does not exceed 1")
    if lam > 2:
        raise NotExpanding(f"Slope {lam} exceeds 2; no unimodal self-map of an interval has it")
    return lam


def _core(g: PiecewiseLinearMap) -> Interval:
    lo, hi = g.domain
    for _ in range(TRIM_MAX_STEPS):
        image = g.image(lo, hi)
        if image[0] == lo and image[1] == hi:
            return lo, hi
        if image[0] < lo or image[1] > hi:
            raise InvalidMap(f"{g} does not map its domain into itself")
        lo, hi = image
    raise NotPostCriticallyFinite(f"The core of {g} did not settle in {TRIM_MAX_STEPS} steps")


def _restrict(g: PiecewiseLinearMap, lo: ZBetaElement, hi: ZBetaElement) -> PiecewiseLinearMap:
    inner = [b for b in g.breakpoints if lo < b < hi]
    points = [lo] + inner + [hi]
    return PiecewiseLinearMap(g.ring, points, [g(x) for x in points])


def _beta_ring(g: PiecewiseLinearMap, lam: ZBetaElement) -> ZBetaRing:
    if g.ring.degree > 1 and lam == g.ring.generator:
        return g.ring
    if all(c == 0 for c in lam.coords[1:]):
        return ZBetaRing.of_rational(Fraction(lam.coords[0]))
    raise NotUniform("The slope must be rational or the generator of the map's ring")


def _transfer(ring: ZBetaRing, x: ZBetaElement) -> ZBetaElement:
    if x.ring == ring:
        return x
    if all(c == 0 for c in x.coords[1:]):
        return ring.from_rational(Fraction(x.coords[0]))
    raise NotUniform(f"{x} has no image in {ring}")


@timed(logger)
def normalize(g: PiecewiseLinearMap) -> NormalForm:
    """Conjugate a PCF unimodal λ-uniform expander to f_{λ,E} with E = (1,−1) or (−1,1)."""
    signs = g.monotone_signs()
    if len(signs) != 2:
        raise NotUnimodal(f"{g} has {len(signs)} laps, expected 2")

    lam = _uniform_slope(g)
    a, b = _core(g)
    h = _restrict(g, a, b)
    conjugacy = Conjugacy(a, b - a)

    left, right = h(a), h(b)
    increasing_first = signs[0] > 0

    if left == (a if increasing_first else b):
        case = NormalFormCase.FIRST_FULL_INCREASING if increasing_first else NormalFormCase.FIRST_FULL_DECREASING
    elif right == (a if increasing_first else b):
        case = NormalFormCase.SECOND_FULL_INCREASING if increasing_first else NormalFormCase.SECOND_FULL_DECREASING
    else:
        raise NotUnimodal(f"Neither branch of {g} is full on its core")

    if case in (NormalFormCase.SECOND_FULL_DECREASING, NormalFormCase.SECOND_FULL_INCREASING):
        conjugacy = Conjugacy(a, b - a, reflected=True)

    E = (1, -1) if case in (NormalFormCase.FIRST_FULL_INCREASING, NormalFormCase.SECOND_FULL_DECREASING) else (-1, 1)
    ring = _beta_ring(g, lam)
    map = GBetaMap(ring, SignConfiguration(E))

    # the conjugated breakpoints must be those of f_{β,E}
    target = PiecewiseLinearMap.from_gbeta(map)
    for x in h.breakpoints:
        y = _transfer(ring, conjugacy.apply(x))
        if _transfer(ring, conjugacy.apply(h(x))) != target(y):
            raise NotUnimodal(f"Conjugated map disagrees with {map} at {y}")

    if isinstance(detect_pcf(map), Undetermined):
        raise NotPostCriticallyFinite(f"{map}: the orbit of 1 does not repeat")

    logger.debug(f"{g} normalizes to {map} (case {int(case)})")
    return NormalForm(map, conjugacy, case, (a, b))


@dataclass(frozen=True)
class LapReport:
    laps: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.laps) - 1

    @property
    def estimate(self) -> float:
        """log(L(n)/L(n−2))/2; a two-step ratio also settles when ±β both drive the lap counts."""
        return math.log(self.laps[-1] / self.laps[-3]) / 2

    @property
    def raw(self) -> float:
        """log L(n)/n."""
        return math.log(self.laps[-1]) / self.n

    def to_json(self) -> dict:
        return {"laps": list(self.laps), "estimate": self.estimate, "raw": self.raw}


@timed(logger)
def lap_entropy(f: PiecewiseLinearMap, n_max: int = DEFAULT_LAP_STEPS, domain: Optional[Interval] = None) -> LapReport:
    """L(0..n_max), counting the laps of f^n through the images of the laps of f^{n−1}.

    A lap of f^n with image I splits into one lap of f^{n+1} per lap of f
    restricted to I; laps never merge, since f^n turns at every lap end.
    """
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if 0 in f.slope_signs:
        raise ValueError(f"{f} has a flat piece")

    lo, hi = domain if domain is not None else f.domain
    turning = f.turning_points()

    intervals: dict[tuple, tuple[Interval, int]] = {(lo.coords, hi.coords): ((lo, hi), 1)}
    laps = [1]

    for _ in range(n_max):
        following: dict[tuple, tuple[Interval, int]] = {}

        for (a, b), count in intervals.values():
            cuts = [a] + [t for t in turning if a < t < b] + [b]
            for left, right in zip(cuts, cuts[1:]):
                y0, y1 = f(left), f(right)
                image = (y0, y1) if y0 <= y1 else (y1, y0)
                key = (image[0].coords, image[1].coords)
                previous = following.get(key, (image, 0))[1]
                following[key] = (image, previous + count)

        if len(following) > LAP_INTERVAL_CAP:
            raise ExplodedBreakpointCount(len(following), LAP_INTERVAL_CAP)

        intervals = following
        laps.append(sum(count for _, count in intervals.values()))

    return LapReport(tuple(laps))


@dataclass(frozen=True)
class EntropyCheck:
    lap: LapReport
    log_beta: float

    @property
    def gap(self) -> float:
        return abs(self.lap.estimate - self.log_beta)

    def to_json(self) -> dict:
        return {**self.lap.to_json(), "log_beta": self.log_beta, "gap": self.gap}


def entropy_cross_check(nf: NormalForm, n_max: int = DEFAULT_LAP_STEPS) -> EntropyCheck:
    report = lap_entropy(PiecewiseLinearMap.from_gbeta(nf.map), n_max)
    return EntropyCheck(report, math.log(float(nf.map.beta)))


def _tent_expansion(word: Sequence[int]) -> Expansion:
    steps = []
    s = 1
    for symbol in word:
        d, e = (0, 1) if symbol == 0 else (2, -1)
        steps.append(ExpansionStep(s, d))
        s *= e

    p = len(steps)
    if s == -1:
        steps += [ExpansionStep(-step.s, step.d) for step in steps]
        p *= 2

    items, k, p = canonical_period(steps, 0, p)
    return Expansion(items, Shape.eventually_periodic(k, p))


def tent_corpus(max_period: int) -> list[GBetaMap]:
    """PCF maps f_{β,(1,−1)} with β ∈ (1, 2] whose orbit of 1 follows a periodic binary word."""
    E = SignConfiguration((1, -1))
    maps: dict[tuple, GBetaMap] = {}

    for p in range(1, max_period + 1):
        for tail in itertools.product((0, 1), repeat=p - 1):
            P = build_parry_polynomial(_tent_expansion((1,) + tail))
            sympy_poly = P.poly.square_free().to_sympy()

            for (lo, hi), _ in sympy_poly.intervals(inf=1, sup=2):
                lo = Fraction(int(lo.p), int(lo.q))
                hi = Fraction(int(hi.p), int(hi.q))
                if hi <= 1:
                    continue

                beta = AlgebraicReal(P.poly, lo, hi).minimal()
                key = (beta.defining, round(float(beta), 12))
                if key in maps:
                    continue

                try:
                    map = GBetaMap(ZBetaRing(beta), E)
                except InvalidMap:
                    continue
                if isinstance(detect_pcf(map), Undetermined):
                    continue
                maps[key] = map

    return sorted(maps.values(), key=lambda map: float(map.beta))


@dataclass(frozen=True)
class ConjugateGapReport:
    max_nonreal_modulus: float
    epsilon: float

    @property
    def passed(self) -> bool:
        return self.max_nonreal_modulus < 2 - self.epsilon


def conjugate_gap_check(nf: NormalForm, epsilon: float) -> ConjugateGapReport:
    """Non-real Parry zeros of the normal form stay below 2 − ε.

    ε comes from the computed boundary curve and is not rigorous.
    """
    zeros = parry_zeros(parry_polynomial_of(nf.map))
    nonreal = [z.modulus for z in zeros if not z.is_real(1e-12)]
    return ConjugateGapReport(max(nonreal, default=0.0), epsilon)
