import math

import numpy as np
import pytest

from gbeta_lab.algebraic import ComplexPoint
from gbeta_lab.boundary import FPowerSeries, boundary_curve
from gbeta_lab.config import ScanConfig
from gbeta_lab.errors import BoundViolation, HypothesisViolation, InsideDisk
from gbeta_lab.spectra import (
    CSV_HEADER,
    ConjugateRecord,
    angle_histogram,
    check_bounds,
    check_classical_bounds,
    classical_records,
    criterion_records,
    emit_csv,
    emit_svg,
    envelope_check,
    inverse_membership_check,
    orbit_power_series,
    read_csv_points,
    records_to_csv,
    scan_omega,
    scan_sources,
    star_convexity_witness,
)


def _record(z, sid="M:9,1", is_real=False):
    return ConjugateRecord(ComplexPoint.of(z), 3.0, sid, 2, is_real)


def test_classical_records():
    records = classical_records((1, 0))

    assert len(records) == 1
    assert complex(records[0].z).real == pytest.approx(-0.6180339887498949)
    assert records[0].is_real
    assert records[0].source_id == "W:1,0"
    assert records[0].degree == 2


def test_classical_records_reject_bad_words():
    with pytest.raises(HypothesisViolation):
        classical_records((1, 1))


def test_criterion_records(worked_criterion):
    records = criterion_records(worked_criterion.M)

    assert len(records) == 2
    assert all(record.is_real for record in records)
    assert {record.source_id for record in records} == {"M:3,1,-1"}
    assert all(record.degree == 3 for record in records)
    assert all(record.beta == pytest.approx(3.2143, abs=1e-3) for record in records)


def test_scan_explicit_sources():
    config = ScanConfig(criterion_sources=((3, 1, -1), (2, 1)), classical_sources=((1, 0),))

    result = scan_omega(config)

    assert len(result) == 3
    assert result.sources == ["M:3,1,-1", "W:1,0"]
    assert [sid for sid, _ in result.failures] == ["M:2,1"]
    assert "HypothesisViolation" in result.failures[0][1]


def test_scan_generated_sources_are_deterministic():
    config = ScanConfig(n_range=(2, 3), coefficient_bound=10, sample_count=10, seed=4)

    sources = scan_sources(config)

    assert sources == scan_sources(config)
    assert sum(sid.startswith("W:") for sid in sources) <= 2
    assert scan_sources(ScanConfig(sample_count=0)) == []


def test_scan_exhaustive_mode():
    config = ScanConfig(n_range=(2, 2), coefficient_bound=4, sample_count=5, mode="exhaustive", classical_share=0.0)

    assert scan_sources(config) == ["M:3,-1", "M:3,1", "M:4,-2", "M:4,-1", "M:4,1"]


def test_check_bounds():
    records = [_record(0.5 + 0.5j), _record(-1.2, is_real=True), _record(1.3j)]

    report = check_bounds(records)
    assert report.count == 3
    assert report.max_modulus == pytest.approx(1.3)
    assert report.max_nonreal_modulus == pytest.approx(1.3)

    with pytest.raises(BoundViolation) as info:
        check_bounds(records + [_record(2.5, is_real=True)])
    assert len(info.value.offenders) == 1


def test_classical_bounds_only_look_at_words():
    records = [_record(1.9j, sid="M:9,1"), _record(-0.618, sid="W:1,0", is_real=True)]

    assert check_classical_bounds(records).count == 1

    with pytest.raises(BoundViolation):
        check_classical_bounds([_record(1.7j, sid="W:1,0,0")])


def test_star_convexity():
    T = FPowerSeries([-1, -1])
    lam = (math.sqrt(5) - 1) / 2

    report = star_convexity_witness(T, lam, 1.2)
    assert report.passed()
    assert report.coefficients_ok

    with pytest.raises(ValueError):
        star_convexity_witness(T, lam, 0.8)

    with pytest.raises(ValueError):
        star_convexity_witness(T, 0.3, 1.2)


def test_orbit_power_series(golden_classical):
    series = orbit_power_series(golden_classical, 6)

    assert series.N == 6
    assert series.coeffs[0] == pytest.approx(0.6180339887498949)
    assert np.all(np.abs(series.coeffs) <= 1)


def test_membership_fails_away_from_the_conjugates(golden_classical):
    assert not inverse_membership_check(golden_classical, 3.0, 100).passed

    with pytest.raises(InsideDisk):
        inverse_membership_check(golden_classical, 0.5j, 100)


def test_envelope_check():
    curve = boundary_curve([0.8, 1.0, 1.2], N=150)
    inside = 1.2 * complex(math.cos(1.0), math.sin(1.0))
    outside = 1.9 * complex(math.cos(1.0), math.sin(1.0))
    elsewhere = 1.3 * complex(math.cos(2.5), math.sin(2.5))

    report = envelope_check([_record(inside), _record(outside), _record(elsewhere), _record(1.5, is_real=True)], curve)

    assert report.checked == 2
    assert report.skipped == 1
    assert len(report.violations) == 1
    assert not report.passed


def test_csv_output(tmp_path):
    records = [_record(0.5 + 0.25j), _record(-0.75, is_real=True)]

    text = records_to_csv(records)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert text.splitlines()[2].endswith(",1")

    path = tmp_path / "omega.csv"
    emit_csv(records, path)
    assert read_csv_points(path) == [(0.5, 0.25, False), (-0.75, 0.0, True)]


def test_csv_header_is_checked(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")

    with pytest.raises(ValueError):
        read_csv_points(path)


def test_svg_is_byte_stable(tmp_path):
    records = [_record(0.5 + 0.25j), _record(-0.75, is_real=True), _record(1.1 - 0.9j)]

    emit_svg(records, tmp_path / "a.svg")
    emit_svg(records, tmp_path / "b.svg")

    data = (tmp_path / "a.svg").read_bytes()
    assert data.startswith(b"<?xml")
    assert data == (tmp_path / "b.svg").read_bytes()


def test_angle_histogram():
    records = [_record(1j), _record(-1j), _record(0.5, is_real=True), _record(-1 + 0.01j)]

    counts = angle_histogram(records, bins=4)

    assert sum(counts) == 3
    assert counts == [0, 1, 0, 2]
