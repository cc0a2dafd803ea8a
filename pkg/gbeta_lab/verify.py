"""Invariant suites run by `gbeta-lab verify`.

Each suite checks one family of identities or bounds over a deterministic
corpus and collects failures instead of stopping at the first one.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math
from typing import Callable, Optional

import numpy as np

from gbeta_lab.algebraic import AlgebraicReal, IntPolynomial
from gbeta_lab.boundary import (
    BoundaryCurve,
    boundary_curve,
    endpoint_check,
    endpoint_series,
    random_series,
    series_zeros,
    solve_lambda_phi,
    zero_lower_bound_check,
)
from gbeta_lab.config import ScanConfig
from gbeta_lab.corpus import Corpus, build_corpus, classical_map
from gbeta_lab.errors import BoundViolation, LabError
from gbeta_lab.gbeta_map import GBetaMap, Undetermined, detect_pcf, itinerary_of, partial_sum_error, recursion_residuals, to_itinerary
from gbeta_lab.logger import get_logger
from gbeta_lab.parry import (
    approximate_inverse_zero,
    build_parry_polynomial,
    check_remainder_bounds,
    make_criterion,
    orbit_series,
    parry_zeros,
    solve_criterion_beta,
    verify_criterion_orbit,
    verify_factor_identity,
    verify_zero_equivalence,
)
from gbeta_lab.parsing import linspace_grid
from gbeta_lab.spectra import (
    ConjugateRecord,
    check_bounds,
    check_classical_bounds,
    classical_records,
    criterion_records,
    envelope_check,
    inverse_membership_check,
    scan_omega,
    scan_sources,
    star_convexity_witness,
)
from gbeta_lab.unimodal import (
    PiecewiseLinearMap,
    conjugate_gap_check,
    entropy_cross_check,
    lap_entropy,
    normalize,
    tent,
    tent_corpus,
)
from gbeta_lab.utils import timed

logger = get_logger(__name__)

SUITES = ("identities", "bounds", "criterion", "boundary", "unimodal")

GOLDEN_MEAN = AlgebraicReal(IntPolynomial((-1, -1, 1)), Fraction(3, 2), Fraction(2))
LAMBDA_NEAR_PI = 0.6491


@dataclass
class SuiteReport:
    name: str
    checks: int = 0
    failures: list[str] = field(default_factory=list)
    metrics: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, condition: bool, message: str):
        self.checks += 1
        if not condition:
            self.failures.append(message)

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "checks": self.checks,
            "passed": self.passed,
            "failures": list(self.failures),
            "metrics": dict(sorted(self.metrics.items())),
        }

    def __str__(self) -> str:
        verdict = "ok" if self.passed else f"{len(self.failures)} failure(s)"
        return f"{self.name}: {self.checks} checks, {verdict}"


@dataclass(frozen=True)
class SuiteSizes:
    criteria: int
    words: int
    factor_points: int
    random_series: int
    star_triples: int
    grid_points: int
    truncation: int
    tent_period: int
    envelope_sources: int

    @classmethod
    def of(cls, quick: bool) -> "SuiteSizes":
        if quick:
            return cls(40, 10, 5, 200, 50, 8, 200, 4, 200)
        return cls(500, 100, 50, 10_000, 1_000, 50, 400, 8, 10_000)


def _corpus_maps(corpus: Corpus, report: SuiteReport) -> list[tuple[str, GBetaMap]]:
    maps = []
    for c in corpus.criteria:
        try:
            maps.append((f"M:{c.M}", verify_criterion_orbit(c, solve_criterion_beta(c)).map))
        except LabError as err:
            report.check(False, f"M = {c.M}: {err}")
    for word in corpus.words:
        maps.append((f"W:{word}", classical_map(word)))
    return maps


def _random_points(rng: np.random.Generator, count: int) -> np.ndarray:
    radius = rng.uniform(1.05, 3.0, count)
    angle = rng.uniform(-math.pi, math.pi, count)
    return radius * np.exp(1j * angle)


def identities_suite(sizes: SuiteSizes, seed: int) -> SuiteReport:
    report = SuiteReport("identities")
    corpus = build_corpus(seed, sizes.criteria, sizes.words)
    rng = np.random.default_rng(seed + 1)

    for label, map in _corpus_maps(corpus, report):
        verdict = detect_pcf(map)
        if isinstance(verdict, Undetermined):
            report.check(False, f"{label}: orbit of 1 does not repeat")
            continue

        residuals = recursion_residuals(map, verdict.degree + 8)
        report.check(all(r.is_zero for r in residuals), f"{label}: recursion identity fails")

        err, bound = partial_sum_error(map, map.one, 30)
        report.check(float(err) <= float(bound) * (1 + 1e-9), f"{label}: partial sums of the expansion of 1 miss by {float(err):.3g}")

        if not verdict.finite:
            n = verdict.degree + 4
            symbolic = to_itinerary(verdict.expansion).take(n)
            report.check(symbolic == list(itinerary_of(map, map.one, n).symbols), f"{label}: itinerary mismatch")

        P = build_parry_polynomial(verdict.expansion)
        report.check(P.poly.is_monic, f"{label}: Parry polynomial is not monic")

        series = orbit_series(map, 400)
        for z in parry_zeros(P):
            if z.modulus <= 1.05:
                continue
            equivalence = verify_zero_equivalence(P, z)
            report.check(
                equivalence.lhs_vanishes and equivalence.consistent,
                f"{label}: zero {complex(z):.6g} is not a zero of the digit series",
            )
            if abs(complex(z) - float(map.beta)) > 1e-6:
                membership = inverse_membership_check(map, complex(z), 400)
                report.check(membership.passed, f"{label}: Σ c_j z^-j does not vanish at {complex(z):.6g}")

        worst = 0.0
        for z in _random_points(rng, sizes.factor_points):
            identity = verify_factor_identity(map, z, 400, series)
            worst = max(worst, identity.difference - identity.tail_bound)
            report.check(identity.holds, f"{label}: factor identity fails at {z:.6g}")
        report.metrics["factor_excess"] = max(report.metrics.get("factor_excess", -math.inf), worst)

    report.metrics["maps"] = float(len(corpus))
    return report


def bounds_suite(sizes: SuiteSizes, seed: int) -> SuiteReport:
    report = SuiteReport("bounds")
    corpus = build_corpus(seed, sizes.criteria, sizes.words)

    records: list[ConjugateRecord] = []
    for c in corpus.criteria:
        try:
            records.extend(criterion_records(c.M))
        except LabError as err:
            report.check(False, f"M = {c.M}: {err}")
    for word in corpus.words:
        records.extend(classical_records(word))

    for name, check in (("all", check_bounds), ("classical", check_classical_bounds)):
        try:
            result = check(records)
        except BoundViolation as err:
            report.check(False, f"{name}: {err}")
            continue
        report.check(True, name)
        report.metrics[f"{name}_max_modulus"] = result.max_modulus
        report.metrics[f"{name}_max_nonreal_modulus"] = result.max_nonreal_modulus

    rng = np.random.default_rng(seed + 2)
    smallest = math.inf
    for _ in range(sizes.random_series):
        T = random_series(rng, 20)
        for w in series_zeros(T):
            try:
                result = zero_lower_bound_check(T, w)
            except ValueError as err:
                report.check(False, str(err))
                continue
            smallest = min(smallest, result.modulus)
            report.check(result.passed, f"zero {w:.6g} of a random series lies inside |w| = 1/2")
    report.metrics["smallest_random_zero"] = smallest

    T, _ = endpoint_series("zero", 40)
    extremal = min(abs(w) for w in series_zeros(T))
    report.check(abs(extremal - 0.5) < 1e-9, f"all-(-1) series has its smallest zero at {extremal!r}")

    for _ in range(sizes.star_triples):
        T = random_series(rng, 20)
        zeros = [w for w in series_zeros(T) if abs(w) < 1]
        if not zeros:
            continue
        lam = min(zeros, key=abs)
        a = float(rng.uniform(1.0, 1 / abs(lam)))
        try:
            witness = star_convexity_witness(T, lam, a)
        except ValueError as err:
            report.check(False, f"star convexity: {err}")
            continue
        report.check(witness.passed(), f"T(w/{a:.4g}) fails at {a * lam:.6g}")

    return report


def criterion_suite(sizes: SuiteSizes, seed: int) -> SuiteReport:
    report = SuiteReport("criterion")
    corpus = build_corpus(seed, sizes.criteria, 0)

    worked = make_criterion((3, 1, -1))
    beta = solve_criterion_beta(worked)
    report.check(3 < float(beta) < 4, f"M = (3,1,-1) isolates β = {float(beta)} outside (3, 4)")

    for c in (worked,) + corpus.criteria:
        try:
            beta = solve_criterion_beta(c)
            verify_criterion_orbit(c, beta)
        except LabError as err:
            report.check(False, f"M = {c.M}: {err}")
            continue
        report.check(True, f"M = {c.M}")

        lo, hi = c.interval
        for x, j in itertools.product((Fraction(lo), Fraction(2 * lo + 1, 2), Fraction(hi)), range(1, c.n)):
            remainder = check_remainder_bounds(c, x, j)
            report.check(remainder.passed, f"M = {c.M}: remainder R_{j}({x}) = {remainder.value}")

    near = approximate_inverse_zero((Fraction(-7, 10), Fraction(3, 10)), _quadratic_zero(-0.7, 0.3), 101)
    far = approximate_inverse_zero((Fraction(-7, 10), Fraction(3, 10)), _quadratic_zero(-0.7, 0.3), 2)
    report.check(near.distance < min(far.distance, 0.01), f"scaled criterion misses by {near.distance:.3g}")
    report.metrics["inverse_zero_distance"] = near.distance

    return report


def _quadratic_zero(b1: float, b2: float) -> complex:
    # a zero of 1 + b1 w + b2 w^2 in the upper half plane
    roots = np.roots([b2, b1, 1.0])
    return complex(max(roots, key=lambda w: w.imag))


def boundary_suite(sizes: SuiteSizes, seed: int, jobs: int = 1, curve: Optional[BoundaryCurve] = None) -> SuiteReport:
    report = SuiteReport("boundary")
    N = sizes.truncation

    if curve is None:
        curve = boundary_curve(linspace_grid(0.1, math.pi - 0.1, sizes.grid_points), N, jobs=jobs)

    report.check(not curve.failures, f"{len(curve.failures)} angle(s) without a solution")
    for sample in curve.samples:
        report.check(0.60 < sample.lam < 0.75, f"λ at φ = {sample.phi:.6g} is {sample.lam:.6g}")

    sup = curve.sup_inverse()
    report.metrics["sup_inverse"] = sup
    report.check(sup < 2 - 0.3, f"sup 1/λ = {sup:.6g} is within 0.3 of 2")

    near_pi = solve_lambda_phi(math.pi - 0.05, N)
    report.metrics["lambda_near_pi"] = near_pi.lam
    report.check(abs(near_pi.lam - LAMBDA_NEAR_PI) < 0.015, f"λ near π is {near_pi.lam:.6g}")

    mirrored = solve_lambda_phi(2 * math.pi - (math.pi - 0.05), N)
    report.check(abs(mirrored.lam - near_pi.lam) < 1e-9, "λ is not symmetric under φ ↦ 2π − φ")

    doubled = solve_lambda_phi(1.0, 2 * N)
    single = solve_lambda_phi(1.0, N)
    report.check(abs(doubled.lam - single.lam) < 1e-9, f"doubling the truncation moves λ by {abs(doubled.lam - single.lam):.3g}")

    for which in ("zero", "pi"):
        result = endpoint_check(which, N)
        report.check(result.passed, f"endpoint series {which} misses its zero by {float(result.value):.3g}")

    config = ScanConfig(sample_count=sizes.envelope_sources, seed=seed, jobs=jobs)
    scan = scan_omega(config)
    envelope = envelope_check(scan, curve)
    report.check(envelope.passed, f"{len(envelope.violations)} conjugate(s) outside the envelope")
    report.metrics["envelope_sources"] = float(len(scan_sources(config)))
    report.metrics["envelope_checked"] = float(envelope.checked)

    try:
        report.metrics["max_nonreal_modulus"] = check_bounds(scan).max_nonreal_modulus
    except BoundViolation as err:
        report.check(False, str(err))

    return report


def unimodal_suite(sizes: SuiteSizes, seed: int, curve: Optional[BoundaryCurve] = None) -> SuiteReport:
    report = SuiteReport("unimodal")
    n_max = 16

    full = lap_entropy(tent(2), 12)
    report.check(list(full.laps) == [2**n for n in range(13)], "tent slope 2 does not double its laps")
    report.check(abs(full.estimate - math.log(2)) < 1e-15, f"tent slope 2 entropy estimate {full.estimate!r}")

    golden = normalize(tent(GOLDEN_MEAN))
    entropy = entropy_cross_check(golden, n_max)
    report.metrics["golden_gap"] = entropy.gap
    report.check(entropy.gap < 1e-2, f"golden tent entropy gap {entropy.gap:.3g}")

    first = PiecewiseLinearMap.from_gbeta(golden.map)
    second = PiecewiseLinearMap.from_gbeta(GBetaMap.create(GOLDEN_MEAN, (-1, 1)))
    expected = lap_entropy(first, 10).laps
    for g in (first, second, first.reflect(), second.reflect()):
        nf = normalize(g)
        laps = lap_entropy(g, 10, domain=nf.core).laps
        normal = lap_entropy(PiecewiseLinearMap.from_gbeta(nf.map), 10).laps
        report.check(laps == normal, f"case {int(nf.case)}: conjugation changes the lap counts")
        if nf.map.E.entries == (1, -1):
            report.check(normal == expected, f"case {int(nf.case)}: lap counts differ from the golden tent")

    epsilon = 2 - (curve.sup_inverse() if curve is not None and curve.samples else 1.59) - 1e-3
    worst = 0.0
    for map in tent_corpus(sizes.tent_period):
        if float(map.beta) < 1.45:
            continue
        try:
            nf = normalize(PiecewiseLinearMap.from_gbeta(map))
        except LabError as err:
            report.check(False, f"{map}: {err}")
            continue

        entropy = entropy_cross_check(nf, n_max)
        worst = max(worst, entropy.gap)
        report.check(entropy.gap < 2 / n_max, f"{map}: entropy gap {entropy.gap:.3g}")

        gap = conjugate_gap_check(nf, epsilon)
        report.check(gap.passed, f"{map}: non-real conjugate of modulus {gap.max_nonreal_modulus:.6g}")

    report.metrics["worst_entropy_gap"] = worst
    report.metrics["epsilon"] = epsilon
    return report


@timed(logger)
def run_suites(names: tuple[str, ...], quick: bool = False, seed: int = 0, jobs: int = 1) -> list[SuiteReport]:
    sizes = SuiteSizes.of(quick)
    curve = None
    reports = []

    runners: dict[str, Callable[[], SuiteReport]] = {
        "identities": lambda: identities_suite(sizes, seed),
        "bounds": lambda: bounds_suite(sizes, seed),
        "criterion": lambda: criterion_suite(sizes, seed),
        "boundary": lambda: boundary_suite(sizes, seed, jobs, curve),
        "unimodal": lambda: unimodal_suite(sizes, seed, curve),
    }

    if "boundary" in names or "unimodal" in names:
        curve = boundary_curve(linspace_grid(0.1, math.pi - 0.1, sizes.grid_points), sizes.truncation, jobs=jobs)

    for name in names:
        if name not in runners:
            raise ValueError(f"Unknown suite {name!r}, expected one of {SUITES}")
        report = runners[name]()
        logger.info(str(report))
        reports.append(report)

    return reports


def suite_names(suite: str) -> tuple[str, ...]:
    if suite == "all":
        return SUITES
    if suite not in SUITES:
        raise ValueError(f"Unknown suite {suite!r}, expected one of {SUITES + ('all',)}")
    return (suite,)
