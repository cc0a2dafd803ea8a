"""The class 𝓕 of power series 1 + Σ a_n w^n with a_n ∈ [−1, 1], and the
curve φ ↦ λ_φ of the smallest modulus of a zero of 𝓕 on the ray arg w = φ.

The set of values {T(re^{iφ}) : T ∈ 𝓕} is convex, so it contains 0 exactly
when the support gap

    G(r, θ) = cos θ − Σ rⁿ |cos(nφ − θ)|

is ≤ 0 for every θ ∈ (−π/2, π/2). G is piecewise of the form
A cos θ + B sin θ between the kinks cos(nφ − θ) = 0, which makes the
maximisation over θ exact.
"""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
from fractions import Fraction
import io
import math
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from gbeta_lab.config import (
    CONTINUITY_SLOPE,
    DEFAULT_BOUNDARY_TOL,
    DEFAULT_TRUNCATION,
    GAP_MAX_STEPS,
    LAMBDA_BRACKET,
    MINIMALITY_RESOLUTION,
    TIE_TOLERANCE,
    WARM_START_RADIUS,
)
from gbeta_lab.errors import NoRoot, OutOfRange, OutsideDisk
from gbeta_lab.logger import get_logger
from gbeta_lab.utils import format_float, timed

logger = get_logger(__name__)

ENDPOINT_SERIES = ("zero", "pi")


@dataclass(frozen=True)
class FPowerSeries:
    """Coefficients a_1..a_N; a_0 = 1 is implicit."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if np.any(np.abs(coeffs) > 1 + 1e-15):
            raise ValueError("Coefficients of 𝓕 must lie in [-1, 1]")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def N(self) -> int:
        return len(self.coeffs)

    @property
    def is_extremal(self) -> bool:
        return bool(np.all(np.abs(self.coeffs) == 1))

    def polynomial(self) -> np.ndarray:
        """Ascending coefficients 1, a_1, …, a_N."""
        return np.concatenate(([1.0], self.coeffs))

    def with_coefficient(self, n: int, value: float) -> "FPowerSeries":
        coeffs = self.coeffs.copy()
        coeffs[n - 1] = value
        return FPowerSeries(coeffs)


@dataclass(frozen=True)
class SeriesValue:
    value: complex
    tail: float


def evaluate(T: FPowerSeries, w: complex) -> SeriesValue:
    w = complex(w)
    r = abs(w)
    if r >= 1:
        raise OutsideDisk(r)

    value = complex(np.polynomial.polynomial.polyval(w, T.polynomial()))
    return SeriesValue(value, r ** (T.N + 1) / (1 - r))


def rotation_coefficients(phi: float, alpha: float, N: int) -> np.ndarray:
    """a_n = +1 when nφ − α mod 2π lies in (0, π), −1 when it lies in (π, 2π).

    Landings on 0 or π take +1.
    """
    n = np.arange(1, N + 1)
    s = np.sin(n * phi - alpha)

    ties = np.abs(s) <= TIE_TOLERANCE
    if np.any(ties):
        logger.info(f"φ = {phi:.12g}, α = {alpha:.12g}: tie at n = {list(n[ties][:8])}, taking +1")

    return np.where(ties | (s > 0), 1.0, -1.0)


@dataclass(frozen=True)
class LowerBoundReport:
    modulus: float
    residual: float
    strict: bool

    @property
    def passed(self) -> bool:
        if self.strict:
            return self.modulus > 0.5
        return self.modulus >= 0.5 - 1e-12


def zero_lower_bound_check(T: FPowerSeries, lam: complex, tol: float = 1e-8) -> LowerBoundReport:
    """Zeros of 𝓕 have modulus at least 1/2, strictly so unless every a_n = −1."""
    lam = complex(lam)
    residual = abs(evaluate(T, lam).value) if abs(lam) < 1 else 0.0
    if residual >= tol:
        raise ValueError(f"{lam} is not a zero of the series (|T| = {residual:.3g})")

    return LowerBoundReport(abs(lam), residual, strict=not bool(np.all(T.coeffs == -1)))


@dataclass(frozen=True)
class SupportGap:
    value: float
    theta: float
    kink: Optional[int] = None


def _gap_at(r: float, phi: float, theta: float, N: int) -> float:
    n = np.arange(1, N + 1)
    return math.cos(theta) - float(np.sum(r**n * np.abs(np.cos(n * phi - theta))))


def support_gap(r: float, phi: float, N: int = DEFAULT_TRUNCATION) -> SupportGap:
    """max over θ ∈ (−π/2, π/2) of G(r, θ), its maximiser and the kink it sits on, if any."""
    n = np.arange(1, N + 1)
    rn = r**n
    c, s = np.cos(n * phi), np.sin(n * phi)

    laps = np.floor(n * phi / math.pi)
    kinks = n * phi - laps * math.pi - math.pi / 2
    # sign of cos(nφ − θ) to the left of the kink
    sigma = np.where(laps % 2 == 0, -1.0, 1.0)

    order = np.argsort(kinks, kind="stable")
    A = 1 - np.sum(sigma * rn * c)
    B = -np.sum(sigma * rn * s)
    dA = np.concatenate(([0.0], np.cumsum(2 * sigma[order] * rn[order] * c[order])))
    dB = np.concatenate(([0.0], np.cumsum(2 * sigma[order] * rn[order] * s[order])))
    A, B = A + dA, B + dB

    edges = np.concatenate(([-math.pi / 2], kinks[order], [math.pi / 2]))
    left, right = edges[:-1], edges[1:]

    stationary = np.arctan2(B, A)
    inside = (stationary >= left) & (stationary <= right)
    at_left = A * np.cos(left) + B * np.sin(left)
    at_right = A * np.cos(right) + B * np.sin(right)

    values = np.where(inside, np.hypot(A, B), np.maximum(at_left, at_right))
    thetas = np.where(inside, stationary, np.where(at_left >= at_right, left, right))

    best = int(np.argmax(values))
    theta = float(thetas[best])

    kink = None
    if not inside[best]:
        edge = best if thetas[best] == left[best] else best + 1
        if 0 < edge <= N:
            kink = int(order[edge - 1]) + 1

    return SupportGap(float(values[best]), theta, kink)


@dataclass(frozen=True)
class LambdaSolution:
    phi: float
    lam: float
    alpha: float
    series: FPowerSeries = field(repr=False)
    residual: float
    residual_pure: float
    truncation: int
    anomalous: Optional[tuple[int, float]] = None
    certified: Optional[bool] = None

    @property
    def zero(self) -> complex:
        return self.lam * complex(math.cos(self.phi), math.sin(self.phi))

    def to_json(self) -> dict:
        return {
            "phi": self.phi,
            "lambda": self.lam,
            "alpha": self.alpha,
            "residual": self.residual,
            "residual_pure": self.residual_pure,
            "n_trunc": self.truncation,
            "anomalous": None if self.anomalous is None else {"n": self.anomalous[0], "a": self.anomalous[1]},
            "anomalous_is_heuristic": self.anomalous is not None,
            "certified": self.certified,
        }


def _check_angle(phi: float) -> tuple[float, bool]:
    phi = math.fmod(phi, 2 * math.pi)
    if phi < 0:
        phi += 2 * math.pi
    if phi <= 0 or phi == math.pi:
        raise OutOfRange(phi, 0, 2 * math.pi)
    if phi > math.pi:
        return 2 * math.pi - phi, True
    return phi, False


def _bracket(phi: float, N: int, lo: float, hi: float) -> Optional[tuple[float, float]]:
    if support_gap(lo, phi, N).value > 0 and support_gap(hi, phi, N).value <= 0:
        return lo, hi
    return None


def _solve_gap(phi: float, N: int, tol: float, lo: float, hi: float) -> tuple[float, SupportGap]:
    """The radius where the support gap on the ray closes; the gap falls with r."""
    try:
        r, result = brentq(lambda r: support_gap(r, phi, N).value, lo, hi, xtol=tol, maxiter=GAP_MAX_STEPS, full_output=True, disp=False)
    except ValueError as err:
        raise NoRoot(phi, [lo, hi]) from err

    gap = support_gap(r, phi, N)
    if not result.converged:
        if abs(gap.value) >= math.sqrt(tol):
            raise NoRoot(phi, [lo, hi])
        logger.warning(f"φ = {phi:.12g}: brentq stopped after {result.iterations} steps at gap {gap.value:.3g}")
    return r, gap


def _relax(phi: float, r: float, theta: float, series: FPowerSeries, pure: complex) -> Optional[tuple[int, float, FPowerSeries, float]]:
    n = np.arange(1, series.N + 1)
    k = int(np.argmin(np.abs(np.cos(n * phi - theta)))) + 1
    w = r * complex(math.cos(phi), math.sin(phi))
    turn = complex(math.cos(theta), -math.sin(theta))

    denominator = (turn * w**k).imag
    if denominator == 0:
        return None

    value = float(np.clip(series.coeffs[k - 1] - (turn * pure).imag / denominator, -1, 1))
    relaxed = series.with_coefficient(k, value)
    return k, value, relaxed, abs(evaluate(relaxed, w).value)


def certify_minimality(phi: float, lam: float, N: int = DEFAULT_TRUNCATION, resolution: float = MINIMALITY_RESOLUTION) -> bool:
    """No zero of 𝓕 on the ray segment (1/2, λ): the support gap stays positive there."""
    phi, _ = _check_angle(phi)
    radii = np.arange(LAMBDA_BRACKET[0] + resolution, lam - resolution / 2, resolution)
    return all(support_gap(float(r), phi, N).value > 0 for r in radii)


@timed(logger)
def solve_lambda_phi(
    phi: float,
    N: int = DEFAULT_TRUNCATION,
    tol: float = DEFAULT_BOUNDARY_TOL,
    warm: Optional[float] = None,
    relax: bool = True,
    certify: bool = False,
) -> LambdaSolution:
    """λ_φ, α_φ and the φ-optimal series whose coefficients follow the rotation rule."""
    original = phi
    phi, reflected = _check_angle(phi)

    bracket = None
    if warm is not None:
        lo = max(LAMBDA_BRACKET[0], warm - WARM_START_RADIUS)
        hi = min(LAMBDA_BRACKET[1], warm + WARM_START_RADIUS)
        bracket = _bracket(phi, N, lo, hi)
    if bracket is None:
        bracket = _bracket(phi, N, *LAMBDA_BRACKET)
    if bracket is None:
        raise NoRoot(original, list(LAMBDA_BRACKET))

    r, gap = _solve_gap(phi, N, tol, *bracket)
    alpha = gap.theta + math.pi / 2

    series = FPowerSeries(rotation_coefficients(phi, alpha, N))
    w = r * complex(math.cos(phi), math.sin(phi))
    pure = evaluate(series, w).value
    residual = abs(pure)

    anomalous = None
    if relax:
        relaxed = _relax(phi, r, gap.theta, series, pure)
        if relaxed is not None and relaxed[3] < residual:
            k, value, series, residual = relaxed
            anomalous = (k, value)
            logger.info(
                f"φ = {phi:.12g}: relaxing a_{k} to {value:.6g} lowers the residual "
                f"from {abs(pure):.3g} to {residual:.3g} (heuristic)"
            )

    certified = certify_minimality(phi, r, N) if certify else None
    if certified is False:
        logger.warning(f"φ = {phi:.12g}: a smaller on-ray zero exists below {r:.12g}")

    if reflected:
        alpha = math.pi - alpha

    return LambdaSolution(original, r, alpha, series, residual, abs(pure), N, anomalous, certified)


@dataclass(frozen=True)
class BoundaryCurve:
    samples: tuple[LambdaSolution, ...]
    failures: tuple[tuple[float, str], ...] = ()
    truncation: int = DEFAULT_TRUNCATION

    @property
    def phis(self) -> np.ndarray:
        return np.array([sample.phi for sample in self.samples])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([sample.lam for sample in self.samples])

    def __len__(self) -> int:
        return len(self.samples)

    def lambda_at(self, phi: float) -> Optional[float]:
        """λ interpolated on the sampled grid; None outside it."""
        if not self.samples:
            return None

        phi = abs(math.remainder(phi, 2 * math.pi))
        phis = np.array([_check_angle(p)[0] for p in self.phis])
        order = np.argsort(phis)
        phis, lambdas = phis[order], self.lambdas[order]

        if not phis[0] <= phi <= phis[-1]:
            return None
        return float(np.interp(phi, phis, lambdas))

    def sup_inverse(self) -> float:
        return float(np.max(1 / self.lambdas))

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["phi", "lambda", "alpha", "residual", "n_trunc"])
        for sample in self.samples:
            writer.writerow(
                [
                    format_float(sample.phi),
                    format_float(sample.lam),
                    format_float(sample.alpha),
                    format_float(sample.residual),
                    sample.truncation,
                ]
            )
        return out.getvalue()

    def to_json(self) -> dict:
        return {
            "samples": [sample.to_json() for sample in self.samples],
            "failures": [{"phi": phi, "error": error} for phi, error in self.failures],
            "sup_inverse": self.sup_inverse() if self.samples else None,
        }


def _solve_chunk(args) -> tuple[list[LambdaSolution], list[tuple[float, str]]]:
    grid, N, tol, certify = args
    samples, failures = [], []
    warm = None

    for phi in grid:
        try:
            sample = solve_lambda_phi(phi, N, tol, warm=warm, certify=certify)
        except NoRoot as err:
            failures.append((phi, str(err)))
            warm = None
            continue
        samples.append(sample)
        warm = sample.lam

    return samples, failures


def _chunks(grid: Sequence[float], count: int) -> list[list[float]]:
    size = math.ceil(len(grid) / count)
    return [list(grid[i : i + size]) for i in range(0, len(grid), size)]


@timed(logger)
def boundary_curve(
    grid: Sequence[float],
    N: int = DEFAULT_TRUNCATION,
    tol: float = DEFAULT_BOUNDARY_TOL,
    jobs: int = 1,
    certify: bool = False,
) -> BoundaryCurve:
    grid = sorted(float(phi) for phi in grid)
    for phi in grid:
        _check_angle(phi)

    chunks = _chunks(grid, max(1, jobs)) if grid else []
    tasks = [(chunk, N, tol, certify) for chunk in chunks]

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(_solve_chunk, tasks))
    else:
        results = [_solve_chunk(task) for task in tasks]

    samples = [sample for chunk, _ in results for sample in chunk]
    failures = [failure for _, chunk in results for failure in chunk]

    for previous, sample in zip(samples, samples[1:]):
        if abs(sample.lam - previous.lam) > CONTINUITY_SLOPE * abs(sample.phi - previous.phi):
            logger.info(
                f"λ jumps by {abs(sample.lam - previous.lam):.3g} between "
                f"φ = {previous.phi:.6g} and φ = {sample.phi:.6g}"
            )

    for phi, error in failures:
        logger.warning(f"φ = {phi:.12g}: {error}")

    return BoundaryCurve(tuple(samples), tuple(failures), N)


def endpoint_series(which: str, N: int = DEFAULT_TRUNCATION) -> tuple[FPowerSeries, Fraction]:
    """The two series vanishing at ±1/2: all a_n = −1, and a_n = (−1)^{n+1}."""
    if which == "zero":
        return FPowerSeries(-np.ones(N)), Fraction(1, 2)
    if which == "pi":
        return FPowerSeries(np.array([(-1.0) ** (n + 1) for n in range(1, N + 1)])), Fraction(-1, 2)
    raise ValueError(f"Unknown endpoint series {which!r}, expected one of {ENDPOINT_SERIES}")


@dataclass(frozen=True)
class EndpointReport:
    which: str
    value: Fraction
    tail: Fraction

    @property
    def passed(self) -> bool:
        return abs(self.value) <= self.tail


def endpoint_check(which: str, N: int = DEFAULT_TRUNCATION) -> EndpointReport:
    """Exact value of the truncated endpoint series at its zero, against |w|^{N+1}/(1−|w|)."""
    T, w = endpoint_series(which, N)

    value = Fraction(1)
    power = Fraction(1)
    for a in T.coeffs:
        power *= w
        value += int(a) * power

    r = abs(w)
    return EndpointReport(which, value, r ** (N + 1) / (1 - r))


def random_series(rng: np.random.Generator, N: int) -> FPowerSeries:
    return FPowerSeries(rng.uniform(-1.0, 1.0, N))


def series_zeros(T: FPowerSeries) -> np.ndarray:
    """Zeros of the polynomial 1 + Σ_{n≤N} a_n wⁿ, itself a member of 𝓕."""
    coeffs = np.trim_zeros(T.polynomial(), "b")
    if len(coeffs) < 2:
        return np.array([], dtype=complex)
    return np.polynomial.polynomial.polyroots(coeffs).astype(complex)
