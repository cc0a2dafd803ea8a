"""Scans of the conjugate set Ω: criterion sequences and classical words go
in, conjugates of the resulting generalized Parry numbers come out."""

from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import io
import math
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from gbeta_lab.algebraic import ComplexPoint, all_roots
from gbeta_lab.boundary import BoundaryCurve, FPowerSeries, evaluate
from gbeta_lab.config import (
    ENVELOPE_TOLERANCE,
    GOLDEN_BOUND,
    MODULUS_LIMIT,
    NONREAL_SOFT_LIMIT,
    REAL_TOLERANCE,
    ScanConfig,
)
from gbeta_lab.corpus import (
    classical_map,
    exhaustive_criteria,
    is_classical_word,
    parse_source_id,
    random_classical_words,
    random_criteria,
    source_id,
)
from gbeta_lab.errors import BoundViolation, HypothesisViolation, InsideDisk, LabError
from gbeta_lab.gbeta_map import GBetaMap, Undetermined, detect_pcf
from gbeta_lab.logger import get_logger
from gbeta_lab.parry import (
    build_parry_polynomial,
    criterion_polynomial,
    make_criterion,
    orbit_series,
    parry_zeros,
    solve_criterion_beta,
    verify_criterion_orbit,
)
from gbeta_lab.render.figures import omega_commands, write_svg
from gbeta_lab.utils import atomic_write, format_float, timed

logger = get_logger(__name__)

CSV_HEADER = ["re", "im", "beta", "source_id", "degree", "is_real"]


@dataclass(frozen=True)
class ConjugateRecord:
    z: ComplexPoint
    beta: float
    source_id: str
    degree: int
    is_real: bool

    @property
    def modulus(self) -> float:
        return self.z.modulus

    @property
    def angle(self) -> float:
        return self.z.angle

    def sort_key(self) -> tuple:
        return self.source_id, self.angle, self.modulus

    def to_row(self) -> list[str]:
        return [
            format_float(self.z.re),
            format_float(self.z.im),
            format_float(self.beta),
            self.source_id,
            str(self.degree),
            "1" if self.is_real else "0",
        ]

    def to_json(self) -> dict:
        return {
            "re": float(self.z.re),
            "im": float(self.z.im),
            "beta": self.beta,
            "source_id": self.source_id,
            "degree": self.degree,
            "is_real": self.is_real,
        }


@dataclass(frozen=True)
class ScanResult:
    records: tuple[ConjugateRecord, ...]
    failures: tuple[tuple[str, str], ...] = field(default=())

    def __iter__(self) -> Iterator[ConjugateRecord]:
        return iter(self.records)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def sources(self) -> list[str]:
        return sorted({record.source_id for record in self.records})


def _drop_beta(zeros: Sequence[ComplexPoint], beta: float) -> list[ComplexPoint]:
    # β is the zero closest to the real value of β
    if not zeros:
        return []
    index = min(range(len(zeros)), key=lambda i: abs(complex(zeros[i]) - beta))
    return list(zeros[:index]) + list(zeros[index + 1 :])


def _records(zeros: Sequence[ComplexPoint], beta: float, sid: str, degree: int) -> list[ConjugateRecord]:
    return [ConjugateRecord(z, beta, sid, degree, z.is_real(REAL_TOLERANCE)) for z in _drop_beta(zeros, beta)]


def criterion_records(M: Sequence[int]) -> list[ConjugateRecord]:
    """The zeros of x^n − Σ M(j)x^{n−j} other than β, once β's orbit checks out."""
    c = make_criterion(M)
    beta = solve_criterion_beta(c)
    verify_criterion_orbit(c, beta)

    q = criterion_polynomial(c)
    return _records(all_roots(q), float(beta), source_id("M", c.M), q.degree)


def classical_records(word: Sequence[int]) -> list[ConjugateRecord]:
    """Zeros of the Parry polynomial of the classical β whose expansion of 1 is w^∞, other than β."""
    if not is_classical_word(word):
        raise HypothesisViolation([f"classical word: {tuple(word)} is not a quasi-greedy expansion of 1"])

    map = classical_map(word)
    verdict = detect_pcf(map)
    if isinstance(verdict, Undetermined):
        raise LabError(f"{map} has no repeat in its orbit of 1 within {verdict.max_steps} steps")

    P = build_parry_polynomial(verdict.expansion)
    return _records(parry_zeros(P), float(map.beta), source_id("W", word), P.degree)


def _scan_source(sid: str) -> tuple[list[ConjugateRecord], Optional[tuple[str, str]]]:
    prefix, values = parse_source_id(sid)
    try:
        if prefix == "M":
            return criterion_records(values), None
        return classical_records(values), None
    except LabError as err:
        logger.debug(f"{sid}: {err}")
        return [], (sid, f"{type(err).__name__}: {err}")


def scan_sources(config: ScanConfig) -> list[str]:
    """Source ids for a scan: the explicit ones when given, generated ones otherwise."""
    if config.explicit:
        return [source_id("M", M) for M in config.criterion_sources] + [
            source_id("W", word) for word in config.classical_sources
        ]

    lo, hi = config.n_range
    if lo > hi or config.sample_count == 0:
        return []

    classical_count = round(config.sample_count * config.classical_share)
    criterion_count = config.sample_count - classical_count
    rng = np.random.default_rng(config.seed)

    if config.mode == "exhaustive":
        criteria = list(exhaustive_criteria(config.n_range, config.coefficient_bound, criterion_count))
    else:
        criteria = random_criteria(rng, config.n_range, config.coefficient_bound, criterion_count)

    max_digit = max(1, config.coefficient_bound // 4)
    words = random_classical_words(rng, config.n_range, max_digit, classical_count)

    return [source_id("M", c.M) for c in criteria] + [source_id("W", word) for word in words]


@timed(logger)
def scan_omega(config: ScanConfig) -> ScanResult:
    sources = scan_sources(config)
    logger.info(f"Scanning {len(sources)} source(s)")

    if config.jobs > 1 and len(sources) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            results = list(executor.map(_scan_source, sources, chunksize=max(1, len(sources) // (4 * config.jobs))))
    else:
        results = [_scan_source(sid) for sid in sources]

    records = sorted((record for chunk, _ in results for record in chunk), key=ConjugateRecord.sort_key)
    failures = sorted(failure for _, failure in results if failure is not None)

    if failures:
        logger.warning(f"{len(failures)} source(s) failed; first: {failures[0][0]} ({failures[0][1]})")

    return ScanResult(tuple(records), tuple(failures))


@dataclass(frozen=True)
class BoundsReport:
    count: int
    max_modulus: float
    max_nonreal_modulus: float
    limit: float

    def to_json(self) -> dict:
        return {
            "count": self.count,
            "max_modulus": self.max_modulus,
            "max_nonreal_modulus": self.max_nonreal_modulus,
            "limit": self.limit,
        }


def check_bounds(records: Iterable[ConjugateRecord], limit: float = MODULUS_LIMIT) -> BoundsReport:
    """Every |z| < limit; the largest non-real modulus is reported for comparison with sup 1/λ_φ."""
    records = list(records)
    offenders = [record for record in records if record.modulus >= limit]
    if offenders:
        raise BoundViolation([(record.source_id, complex(record.z)) for record in offenders], limit)

    max_modulus = max((record.modulus for record in records), default=0.0)
    max_nonreal = max((record.modulus for record in records if not record.is_real), default=0.0)

    if max_nonreal > NONREAL_SOFT_LIMIT:
        logger.warning(f"Largest non-real modulus {max_nonreal:.6f} exceeds the expected {NONREAL_SOFT_LIMIT}")

    return BoundsReport(len(records), max_modulus, max_nonreal, limit)


def check_classical_bounds(records: Iterable[ConjugateRecord]) -> BoundsReport:
    """Classical β-transformations keep every conjugate within the golden mean."""
    return check_bounds((record for record in records if record.source_id.startswith("W:")), GOLDEN_BOUND + 1e-6)


@dataclass(frozen=True)
class StarConvexityReport:
    scaled: FPowerSeries
    residual: float
    coefficients_ok: bool

    def passed(self, tol: float = 1e-8) -> bool:
        return self.coefficients_ok and self.residual < tol


def star_convexity_witness(T: FPowerSeries, lam: complex, a: float, tol: float = 1e-8) -> StarConvexityReport:
    """T̄(w) = T(w/a) lies in 𝓕 and vanishes at aλ."""
    if a < 1:
        raise ValueError("The scale a must be at least 1")

    lam = complex(lam)
    if abs(evaluate(T, lam).value) >= tol:
        raise ValueError(f"{lam} is not a zero of the series")

    scaled = FPowerSeries(T.coeffs / a ** np.arange(1, T.N + 1))
    coefficients_ok = bool(np.all(np.abs(scaled.coeffs) <= 1))

    point = a * lam
    if abs(point) < 1:
        residual = abs(evaluate(scaled, point).value)
    else:
        residual = abs(complex(np.polynomial.polynomial.polyval(point, scaled.polynomial())))
    return StarConvexityReport(scaled, residual, coefficients_ok)


def orbit_power_series(map: GBetaMap, N: int) -> FPowerSeries:
    """Σ c_j w^j with c_j = s(j+1)f^j(1); c_0 = 1 and every |c_j| ≤ 1."""
    return FPowerSeries(orbit_series(map, N).c[1 : N + 1])


@dataclass(frozen=True)
class MembershipReport:
    residual: float
    tail: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tail + 1e-9


def inverse_membership_check(map: GBetaMap, z: complex, N: int) -> MembershipReport:
    """|Σ_{j≤N} c_j z^{-j}| against its tail, at a Parry zero z ≠ β with |z| > 1."""
    z = complex(z)
    r = abs(z)
    if r <= 1:
        raise InsideDisk(r)

    value = evaluate(orbit_power_series(map, N), 1 / z)
    return MembershipReport(abs(value.value), value.tail)


@dataclass(frozen=True)
class EnvelopeReport:
    checked: int
    skipped: int
    violations: tuple[tuple[str, complex, float], ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def envelope_check(records: Iterable[ConjugateRecord], curve: BoundaryCurve, tol: float = ENVELOPE_TOLERANCE) -> EnvelopeReport:
    """Non-real records outside the unit disk stay within 1/λ_{arg z} + tol."""
    checked = skipped = 0
    violations = []

    for record in records:
        if record.is_real or record.modulus <= 1:
            continue

        lam = curve.lambda_at(record.angle)
        if lam is None:
            skipped += 1
            continue

        checked += 1
        if record.modulus > 1 / lam + tol:
            violations.append((record.source_id, complex(record.z), 1 / lam))

    if skipped:
        logger.debug(f"{skipped} record(s) fall outside the sampled angles")
    return EnvelopeReport(checked, skipped, tuple(violations))


def records_to_csv(records: Iterable[ConjugateRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for record in records:
        writer.writerow(record.to_row())
    return out.getvalue()


def emit_csv(records: Iterable[ConjugateRecord], path: Union[str, Path]) -> int:
    size = atomic_write(path, records_to_csv(records))
    logger.info(f"Wrote {path}")
    return size


def read_csv_points(path: Union[str, Path]) -> list[tuple[float, float, bool]]:
    """(re, im, is_real) from a scan CSV."""
    with open(path, "r", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path} does not have the header {','.join(CSV_HEADER)}")
        return [(float(row["re"]), float(row["im"]), row["is_real"] == "1") for row in reader]


def emit_svg(records: Iterable[ConjugateRecord], path: Union[str, Path], style: str = "default") -> int:
    points = [(float(record.z.re), float(record.z.im), record.is_real) for record in records]
    return write_svg(omega_commands(points, style), path, title="Ω")


def angle_histogram(records: Iterable[ConjugateRecord], bins: int = 12) -> list[int]:
    """Counts of non-real records by argument over (−π, π]."""
    counts = [0] * bins
    for record in records:
        if record.is_real:
            continue
        index = min(int((record.angle + math.pi) / (2 * math.pi) * bins), bins - 1)
        counts[index] += 1
    return counts
