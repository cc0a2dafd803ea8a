"""The (β, E)-transformation on [0, 1] and its symbolic dynamics.

Branch intervals are right-closed: I_0 = [0, 1/β], I_k = (k/β, (k+1)/β],
I_m = (m/β, 1]. Branch k is increasing when E(k) = +1 and decreasing when
E(k) = -1.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import itertools
import math
from typing import Iterator, Optional, Sequence, Union

import mpmath

from gbeta_lab.algebraic import AlgebraicReal, Ordering, ZBetaElement, ZBetaRing
from gbeta_lab.config import DEFAULT_PCF_MAX_STEPS, DEFAULT_PRECISION_BITS
from gbeta_lab.errors import InvalidMap, InvalidSymbol, NotFinite, NotInfinite, OutOfRange
from gbeta_lab.logger import get_logger

logger = get_logger(__name__)


class ShapeKind(Enum):
    FINITE = "finite"
    PERIODIC = "periodic"
    PREPERIODIC = "preperiodic"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class Shape:
    kind: ShapeKind
    preperiod: int = 0
    period: int = 0
    length: int = 0

    @classmethod
    def finite(cls) -> "Shape":
        return cls(ShapeKind.FINITE)

    @classmethod
    def periodic(cls, p: int) -> "Shape":
        return cls(ShapeKind.PERIODIC, 0, p)

    @classmethod
    def eventually_periodic(cls, k: int, p: int) -> "Shape":
        if k == 0:
            return cls.periodic(p)
        return cls(ShapeKind.PREPERIODIC, k, p)

    @classmethod
    def truncated(cls, n: int) -> "Shape":
        return cls(ShapeKind.TRUNCATED, length=n)

    @property
    def is_infinite(self) -> bool:
        return self.kind in (ShapeKind.PERIODIC, ShapeKind.PREPERIODIC)

    def __str__(self) -> str:
        if self.kind is ShapeKind.PERIODIC:
            return f"Periodic({self.period})"
        if self.kind is ShapeKind.PREPERIODIC:
            return f"Preperiodic({self.preperiod},{self.period})"
        if self.kind is ShapeKind.TRUNCATED:
            return f"Truncated({self.length})"
        return "Finite"

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "preperiod": self.preperiod,
            "period": self.period,
            "length": self.length,
        }


def canonical_period(items: Sequence, k: int, p: int) -> tuple[tuple, int, int]:
    """Rewrite an eventually periodic word with the smallest period, then the smallest preperiod."""
    block = list(items[k : k + p])
    q = next(
        q
        for q in range(1, p + 1)
        if p % q == 0 and all(block[i] == block[(i + q) % p] for i in range(p))
    )

    unrolled = list(items[:k]) + block[:q] * 2
    while k > 0 and unrolled[k - 1] == unrolled[k - 1 + q]:
        k -= 1

    return tuple(unrolled[: k + q]), k, q


def _unroll(items: Sequence, k: int, p: int, n: int) -> list:
    out = list(items[:n])
    while len(out) < n:
        out.append(items[k + (len(out) - k) % p])
    return out


@dataclass(frozen=True)
class SignConfiguration:
    entries: tuple[int, ...]

    def __post_init__(self):
        entries = tuple(int(e) for e in self.entries)
        if not entries:
            raise InvalidMap("A sign configuration needs at least one entry")
        if any(e not in (1, -1) for e in entries):
            raise InvalidMap(f"Sign entries must be +1 or -1, got {entries}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def classical(cls, m: int) -> "SignConfiguration":
        return cls((1,) * (m + 1))

    @property
    def m(self) -> int:
        return len(self.entries) - 1

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, k: int) -> int:
        return self.entries[k]

    def __iter__(self):
        return iter(self.entries)

    def sign_of(self, word: Sequence[int]) -> int:
        sign = 1
        for symbol in word:
            sign *= self.entries[symbol]
        return sign

    def __str__(self) -> str:
        return "(" + ",".join(f"{e:+d}" for e in self.entries) + ")"


@dataclass(frozen=True)
class GBetaMap:
    ring: ZBetaRing
    E: SignConfiguration
    m: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.E, SignConfiguration):
            object.__setattr__(self, "E", SignConfiguration(tuple(self.E)))

        m = self.ring.beta.ceil() - 1
        if m < 1:
            raise InvalidMap(f"β must exceed 1, got {self.ring.beta}")
        if len(self.E) != m + 1:
            raise InvalidMap(f"β in ({m}, {m + 1}] needs {m + 1} signs, got {len(self.E)}")

        object.__setattr__(self, "m", m)

    @classmethod
    def create(cls, beta: Union[AlgebraicReal, ZBetaRing], E: Sequence[int]) -> "GBetaMap":
        ring = beta if isinstance(beta, ZBetaRing) else ZBetaRing(beta)
        return cls(ring, SignConfiguration(tuple(E)))

    @property
    def beta(self) -> AlgebraicReal:
        return self.ring.beta

    @property
    def one(self) -> ZBetaElement:
        return self.ring.one

    @property
    def zero(self) -> ZBetaElement:
        return self.ring.zero

    @property
    def is_classical(self) -> bool:
        return all(e == 1 for e in self.E)

    def __str__(self) -> str:
        return f"f[β={float(self.beta):.12g}, E={self.E}]"


@dataclass(frozen=True)
class ExpansionStep:
    s: int
    d: int

    @property
    def signed(self) -> int:
        return self.s * self.d


@dataclass(frozen=True)
class Expansion:
    """Steps (s(j), d(j)); eventually periodic shapes store one prefix plus one block."""

    steps: tuple[ExpansionStep, ...]
    shape: Shape
    next_sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.steps and self.steps[0].s != 1:
            raise ValueError("Expansions start with s(1) = +1")
        if self.shape.kind is ShapeKind.FINITE and self.steps and self.steps[-1].d == 0:
            raise ValueError("A finite expansion cannot end with the digit 0")

    @property
    def preperiod(self) -> int:
        return self.shape.preperiod

    @property
    def period(self) -> int:
        return self.shape.period

    def take(self, n: int) -> list[ExpansionStep]:
        if self.shape.is_infinite:
            return _unroll(self.steps, self.preperiod, self.period, n)
        if self.shape.kind is ShapeKind.FINITE:
            padding = [ExpansionStep(self.next_sign, 0)] * max(0, n - len(self.steps))
            return list(self.steps[:n]) + padding
        if n > len(self.steps):
            raise ValueError(f"Only {len(self.steps)} steps of a truncated expansion are known")
        return list(self.steps[:n])

    def signed_digits(self, n: int) -> list[int]:
        return [step.signed for step in self.take(n)]

    def to_json(self) -> dict:
        return {
            "shape": str(self.shape),
            "steps": [{"s": step.s, "d": step.d} for step in self.steps],
            "preperiod": self.preperiod,
            "period": self.period,
        }

    def __str__(self) -> str:
        body = " ".join(f"({step.s:+d},{step.d})" for step in self.steps)
        return f"{self.shape}: {body}"


@dataclass(frozen=True)
class Itinerary:
    symbols: tuple[int, ...]
    shape: Shape

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))

    def take(self, n: int) -> list[int]:
        if self.shape.is_infinite:
            return _unroll(self.symbols, self.shape.preperiod, self.shape.period, n)
        return list(self.symbols[:n])

    def to_json(self) -> dict:
        return {"symbols": list(self.symbols), "shape": str(self.shape)}


@dataclass(frozen=True)
class OrbitStep:
    """One iterate: the point f^j(x), the step taken from it and its image."""

    point: ZBetaElement
    sign: int
    branch: int
    branch_sign: int
    digit: int
    image: ZBetaElement


def _check_unit(map: GBetaMap, x: ZBetaElement):
    if map.ring.sign(x) < 0 or map.ring.compare(x, map.one) > 0:
        raise OutOfRange(float(x), 0, 1)


def classify(map: GBetaMap, x: ZBetaElement) -> int:
    _check_unit(map, x)

    y = x.times_beta()
    if y.is_zero:
        return 0
    return max(0, map.ring.ceil(y) - 1)


def _step(map: GBetaMap, x: ZBetaElement) -> tuple[ZBetaElement, int, int, int]:
    k = classify(map, x)
    e = map.E[k]
    y = x.times_beta()

    if e == 1:
        return y - k, e, k, k
    return (k + 1) - y, e, k + 1, k


def step(map: GBetaMap, x: ZBetaElement) -> tuple[ZBetaElement, int, int]:
    image, e, d, _ = _step(map, x)
    return image, e, d


def orbit(map: GBetaMap, x: ZBetaElement) -> Iterator[OrbitStep]:
    s = 1
    while True:
        image, e, d, k = _step(map, x)
        yield OrbitStep(x, s, k, e, d, image)
        x = image
        s *= e


def _trace(map: GBetaMap, x: ZBetaElement, max_steps: int) -> tuple[Expansion, list[ZBetaElement]]:
    points = [x]

    if x.is_zero and map.E[0] == 1:
        return Expansion((), Shape.finite()), points

    seen = {x.coords: 0}
    steps: list[ExpansionStep] = []
    next_sign = 1

    for j, item in enumerate(itertools.islice(orbit(map, x), max_steps), start=1):
        steps.append(ExpansionStep(item.sign, item.digit))
        next_sign = item.sign * item.branch_sign
        image = item.image

        if image.is_zero and map.E[0] == 1:
            points.append(image)
            return Expansion(tuple(steps), Shape.finite(), next_sign), points

        if image.coords in seen:
            i = seen[image.coords]
            return _eventually_periodic(steps, i, j, next_sign), points

        seen[image.coords] = j
        points.append(image)

    return Expansion(tuple(steps), Shape.truncated(len(steps)), next_sign), points


def _eventually_periodic(steps: list[ExpansionStep], i: int, j: int, next_sign: int) -> Expansion:
    # f^i(x) = f^j(x); the pairs repeat after one cycle only when the
    # cumulative sign is back where it was
    items = list(steps)
    p = j - i
    if next_sign != steps[i].s:
        items += [ExpansionStep(-item.s, item.d) for item in steps[i:j]]
        p *= 2

    items, k, p = canonical_period(items, i, p)
    return Expansion(items, Shape.eventually_periodic(k, p))


def expand(map: GBetaMap, x: ZBetaElement, max_steps: int) -> Expansion:
    _check_unit(map, x)
    expansion, _ = _trace(map, x, max_steps)
    return expansion


def finite_to_infinite(exp: Expansion, one: Optional[Expansion] = None) -> Expansion:
    """Turn a finite expansion into its infinite form.

    Without `one` the expansion is taken to be that of 1 and its block
    repeats. Otherwise the infinite expansion of 1 becomes the tail.
    """
    if exp.shape.kind is not ShapeKind.FINITE:
        raise NotFinite(exp.shape)

    if not exp.steps:
        return Expansion((ExpansionStep(1, 0),), Shape.periodic(1))

    last = exp.steps[-1]
    prefix = list(exp.steps[:-1]) + [ExpansionStep(last.s, last.d - last.s)]

    if one is None:
        items, k, p = canonical_period(prefix, 0, len(prefix))
    else:
        if not one.shape.is_infinite:
            raise NotInfinite(one.shape)
        tail = list(one.steps)
        items, k, p = canonical_period(prefix + tail, len(prefix) + one.preperiod, one.period)

    return Expansion(items, Shape.eventually_periodic(k, p))


def _symbol(current: ExpansionStep, following_sign: int) -> int:
    return current.d if following_sign == current.s else current.d - 1


def to_itinerary(exp: Expansion) -> Itinerary:
    if exp.shape.is_infinite:
        n = exp.preperiod + exp.period
        seq = exp.take(n + 1)
        symbols = [_symbol(seq[j], seq[j + 1].s) for j in range(n)]
        symbols, k, p = canonical_period(symbols, exp.preperiod, exp.period)
        return Itinerary(symbols, Shape.eventually_periodic(k, p))

    seq = list(exp.steps)
    signs = [item.s for item in seq[1:]] + [exp.next_sign]
    symbols = [_symbol(item, sign) for item, sign in zip(seq, signs)]
    return Itinerary(symbols, Shape.truncated(len(symbols)))


def itinerary_of(map: GBetaMap, x: ZBetaElement, n: int) -> Itinerary:
    """The branch indices of x, f(x), …, f^{n-1}(x)."""
    _check_unit(map, x)
    symbols = [item.branch for item in itertools.islice(orbit(map, x), n)]
    return Itinerary(symbols, Shape.truncated(len(symbols)))


def _symbols(word) -> Sequence[int]:
    return word.symbols if isinstance(word, Itinerary) else word


def _check_symbols(word: Sequence[int], E: SignConfiguration):
    for symbol in word:
        if not 0 <= symbol <= E.m:
            raise InvalidSymbol(symbol, E.m)


def _compare_common(w: Sequence[int], v: Sequence[int], E: SignConfiguration) -> Ordering:
    sign = 1
    for a, b in zip(w, v):
        if a != b:
            return Ordering.of((a - b) * sign)
        sign *= E[a]
    return Ordering.EQUAL


def order_E(w: Sequence[int], v: Sequence[int], E: SignConfiguration) -> Ordering:
    """Sign-twisted lexicographic order; a proper prefix sorts first."""
    w, v = _symbols(w), _symbols(v)
    _check_symbols(w, E)
    _check_symbols(v, E)

    verdict = _compare_common(w, v, E)
    if verdict is not Ordering.EQUAL:
        return verdict
    return Ordering.of(len(w) - len(v))


def is_admissible(w: Union[Itinerary, Sequence[int]], it1: Union[Itinerary, Sequence[int]], E: SignConfiguration) -> bool:
    """Every shift of w stays ≤_E it1, checked on the horizon the words allow."""
    if not isinstance(w, Itinerary):
        w = Itinerary(tuple(w), Shape.truncated(len(w)))
    if not isinstance(it1, Itinerary):
        it1 = Itinerary(tuple(it1), Shape.truncated(len(it1)))

    _check_symbols(w.symbols, E)
    _check_symbols(it1.symbols, E)

    if w.shape.is_infinite and it1.shape.is_infinite:
        horizon = max(w.shape.preperiod, it1.shape.preperiod) + math.lcm(w.shape.period, it1.shape.period)
        shifts = w.shape.preperiod + w.shape.period
        reference = it1.take(horizon)
        return all(
            _compare_common(w.take(j + horizon)[j:], reference, E) is not Ordering.GREATER
            for j in range(shifts)
        )

    if w.shape.is_infinite:
        length = len(it1.symbols) + w.shape.preperiod + w.shape.period
        shifts = w.shape.preperiod + w.shape.period
    else:
        length = len(w.symbols)
        shifts = length

    word = w.take(length)
    reference = it1.take(max(len(it1.symbols), length)) if it1.shape.is_infinite else list(it1.symbols)
    return all(_compare_common(word[j:], reference, E) is not Ordering.GREATER for j in range(shifts))


@dataclass(frozen=True)
class PCF:
    preperiod: int
    period: int
    orbit: tuple[ZBetaElement, ...]
    expansion: Expansion
    finite: bool = False

    @property
    def degree(self) -> int:
        return self.preperiod + self.period


@dataclass(frozen=True)
class Undetermined:
    max_steps: int


def detect_pcf(map: GBetaMap, max_steps: int = DEFAULT_PCF_MAX_STEPS) -> Union[PCF, Undetermined]:
    expansion, points = _trace(map, map.one, max_steps)

    if expansion.shape.kind is ShapeKind.TRUNCATED:
        logger.debug(f"{map}: no repeat within {max_steps} steps")
        return Undetermined(max_steps)

    finite = expansion.shape.kind is ShapeKind.FINITE
    if finite:
        expansion = finite_to_infinite(expansion)

    return PCF(expansion.preperiod, expansion.period, tuple(points), expansion, finite)


def recursion_residuals(map: GBetaMap, n: int) -> list[ZBetaElement]:
    """β·c_j − s(j+1)d(j+1) − c_{j+1} for j < n, with c_j = s(j+1)·f^j(1)."""
    residuals = []
    previous = None

    for item in itertools.islice(orbit(map, map.one), n + 1):
        c = item.point * item.sign
        if previous is not None:
            c_prev, s_prev, d_prev = previous
            residuals.append(c_prev.times_beta() - s_prev * d_prev - c)
        previous = (c, item.sign, item.digit)

    return residuals


def partial_sum_error(map: GBetaMap, x: ZBetaElement, n: int, bits: int = DEFAULT_PRECISION_BITS) -> tuple[mpmath.mpf, mpmath.mpf]:
    """|x − Σ_{j≤n} s(j)d(j)β^{-j}| and the bound β^{-n}."""
    _check_unit(map, x)
    beta = map.ring.beta_mpf(bits)

    with mpmath.workprec(bits):
        total = mpmath.mpf(0)
        scale = mpmath.mpf(1)
        for item in itertools.islice(orbit(map, x), n):
            scale /= beta
            total += item.sign * item.digit * scale
        return abs(x.to_mpf(bits) - total), scale


def rational_point(map: GBetaMap, value: Union[int, Fraction]) -> ZBetaElement:
    return map.ring.from_rational(Fraction(value))


@dataclass(frozen=True)
class OrbitCycle:
    """The orbit of x up to its first repeat, f^i(x) = f^{i+P}(x).

    `flip` is the product of branch signs over one cycle, so the
    cumulative sign is multiplied by it every P steps.
    """

    items: tuple[OrbitStep, ...]
    preperiod: int
    period: int
    flip: int

    def at(self, j: int) -> OrbitStep:
        if j < len(self.items):
            return self.items[j]

        laps, r = divmod(j - self.preperiod, self.period)
        base = self.items[self.preperiod + r]
        return OrbitStep(base.point, base.sign * self.flip**laps, base.branch, base.branch_sign, base.digit, base.image)

    def take(self, n: int) -> list[OrbitStep]:
        return [self.at(j) for j in range(n)]


def orbit_cycle(map: GBetaMap, x: Optional[ZBetaElement] = None, max_steps: int = DEFAULT_PCF_MAX_STEPS) -> Optional[OrbitCycle]:
    """Follow the actual orbit (through 0 when the orbit lands there) until a point repeats."""
    x = map.one if x is None else x
    _check_unit(map, x)

    seen = {x.coords: 0}
    items: list[OrbitStep] = []

    for j, item in enumerate(itertools.islice(orbit(map, x), max_steps), start=1):
        items.append(item)
        if item.image.coords in seen:
            i = seen[item.image.coords]
            flip = 1
            for cycle_item in items[i:]:
                flip *= cycle_item.branch_sign
            return OrbitCycle(tuple(items), i, j - i, flip)
        seen[item.image.coords] = j

    return None
