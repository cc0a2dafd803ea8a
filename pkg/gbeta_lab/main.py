import argparse
import csv
import json
import math
import sys
from typing import Optional, Sequence

from gbeta_lab.boundary import boundary_curve
from gbeta_lab.config import (
    DEFAULT_BOUNDARY_TOL,
    DEFAULT_EXPAND_STEPS,
    DEFAULT_LAP_STEPS,
    DEFAULT_PCF_MAX_STEPS,
    DEFAULT_TRUNCATION,
    BoundaryConfig,
    ScanConfig,
)
from gbeta_lab.errors import BoundViolation, LabError, ParsingError, VerificationFailure
from gbeta_lab.gbeta_map import GBetaMap, Undetermined, detect_pcf, expand, orbit, rational_point, to_itinerary
from gbeta_lab.logger import get_logger, set_verbosity
from gbeta_lab.parry import (
    check_remainder_bounds,
    make_criterion,
    parry_polynomial_of,
    parry_zeros,
    solve_criterion_beta,
    verify_criterion_orbit,
)
from gbeta_lab.parsing import linspace_grid, parse_beta, parse_grid, parse_int_list, parse_rational, parse_signs
from gbeta_lab.render.figures import STYLES, boundary_commands, omega_commands, write_svg
from gbeta_lab.spectra import CSV_HEADER, check_bounds, emit_csv, emit_svg, envelope_check, read_csv_points, records_to_csv, scan_omega
from gbeta_lab.unimodal import PiecewiseLinearMap, conjugate_gap_check, entropy_cross_check, normalize
from gbeta_lab.utils import atomic_write, format_float
from gbeta_lab.verify import SUITES, run_suites, suite_names

logger = get_logger(__name__)

DEFAULT_BOUNDARY_POINTS = 50


def _emit(args, text: str):
    if getattr(args, "out", None):
        atomic_write(args.out, text)
        logger.info(f"Wrote {args.out}")
    else:
        sys.stdout.write(text)


def _emit_json(args, data):
    _emit(args, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _map_from_args(args) -> GBetaMap:
    return GBetaMap.create(parse_beta(args.beta), parse_signs(args.signs))


def _point_from_args(map: GBetaMap, text: str):
    if text == "one":
        return map.one
    return rational_point(map, parse_rational(text))


def _zero_json(z) -> dict:
    return {
        "re": format_float(z.re),
        "im": format_float(z.im),
        "modulus": format_float(z.modulus),
    }


def cmd_expand(args) -> int:
    map = _map_from_args(args)
    expansion = expand(map, _point_from_args(map, args.x), args.max)

    data = {"map": str(map), "expansion": expansion.to_json()}
    if expansion.shape.is_infinite:
        data["itinerary"] = to_itinerary(expansion).to_json()
    _emit_json(args, data)
    return 0


def cmd_orbit(args) -> int:
    map = _map_from_args(args)
    x = _point_from_args(map, args.x)

    steps = []
    for j, item in zip(range(args.max), orbit(map, x)):
        steps.append(
            {
                "j": j,
                "point": item.point.to_json(),
                "value": format_float(float(item.point)),
                "branch": item.branch,
                "sign": item.sign,
                "digit": item.digit,
            }
        )

    verdict = detect_pcf(map, args.max_steps)
    if isinstance(verdict, Undetermined):
        pcf = {"pcf": False, "max_steps": verdict.max_steps}
    else:
        pcf = {"pcf": True, "preperiod": verdict.preperiod, "period": verdict.period, "finite": verdict.finite}

    if args.json:
        _emit_json(args, {"map": str(map), "orbit": steps, "verdict": pcf})
        return 0

    lines = [str(map)]
    for step in steps:
        point = " ".join(step["point"])
        lines.append(f"{step['j']:>4}  [{point}]  {step['value']}  k={step['branch']} s={step['sign']:+d} d={step['digit']}")
    if pcf["pcf"]:
        lines.append(f"PCF: preperiod {pcf['preperiod']}, period {pcf['period']}" + (" (finite)" if pcf["finite"] else ""))
    else:
        lines.append(f"Orbit of 1 does not repeat within {pcf['max_steps']} steps")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def cmd_parry(args) -> int:
    map = _map_from_args(args)
    P = parry_polynomial_of(map, args.max_steps)
    zeros = parry_zeros(P)

    _emit_json(args, {"map": str(map), "polynomial": P.to_json(), "zeros": [_zero_json(z) for z in zeros]})
    return 0


def cmd_criterion(args) -> int:
    free_signs = parse_signs(args.free_signs) if args.free_signs else None
    c = make_criterion(parse_int_list(args.m), free_signs)
    beta = solve_criterion_beta(c)
    report = verify_criterion_orbit(c, beta)

    lo, hi = c.interval
    remainders = {(x, j): check_remainder_bounds(c, x, j) for x in (lo, hi) for j in range(1, c.n)}
    failed = [(x, j) for (x, j), r in remainders.items() if not r.passed]
    for x, j in failed:
        r = remainders[x, j]
        logger.error(f"R_{j}({x}) = {r.value} against bound {r.bound} and sign {r.expected_sign:+d}")
    if failed:
        raise VerificationFailure(c.n, f"{len(failed)} remainder bound(s) fail")

    if args.json:
        data = report.to_json()
        data["remainders_passed"] = True
        _emit_json(args, data)
    else:
        lines = [
            f"M = {list(c.M)}",
            f"a = {list(c.a)}, s = {list(c.s)}",
            f"It(1..n) = {list(c.itinerary)}, E = {c.E}",
            f"β = {format_float(float(beta))} in ({lo}, {hi}), root of {beta.defining}",
            f"PCF confirmed: preperiod {report.pcf.preperiod}, period {report.pcf.period}",
            f"Remainder bounds: {len(remainders)}/{len(remainders)} hold",
        ]
        _emit(args, "\n".join(lines) + "\n")

    return 0


def cmd_scan(args) -> int:
    config = ScanConfig.from_json(args.config) if args.config else ScanConfig()
    config = config.with_overrides(seed=args.seed, sample_count=args.samples, mode=args.mode, jobs=args.jobs, svg_path=args.svg)

    result = scan_omega(config)
    for sid, error in result.failures:
        logger.warning(f"{sid}: {error}")

    if args.out:
        emit_csv(result, args.out)
    else:
        sys.stdout.write(records_to_csv(result))

    if config.svg_path:
        emit_svg(result, config.svg_path, args.style)

    bounds = check_bounds(result)
    logger.info(
        f"{bounds.count} conjugates from {len(result.sources)} sources, "
        f"max |z| = {bounds.max_modulus:.6f}, max non-real |z| = {bounds.max_nonreal_modulus:.6f}"
    )

    if args.envelope:
        curve = boundary_curve(linspace_grid(0.1, math.pi - 0.1, args.points), args.trunc, jobs=config.jobs)
        envelope = envelope_check(result, curve)
        logger.info(
            f"Envelope: {envelope.checked} conjugates checked, {envelope.skipped} outside the sampled angles, "
            f"{len(envelope.violations)} above 1/λ"
        )
        for sid, z, limit in envelope.violations:
            logger.error(f"{sid}: |{z:.6g}| = {abs(z):.6f} above 1/λ = {limit:.6f}")
        if not envelope.passed:
            return 1

    return 0


def cmd_boundary(args) -> int:
    if args.grid:
        grid = parse_grid(args.grid)
    else:
        grid = linspace_grid(0.1, math.pi - 0.1, args.points)

    config = BoundaryConfig(tuple(grid), args.trunc, args.tol, args.jobs or 1, args.certify)
    curve = boundary_curve(config.grid, config.truncation, config.tol, config.jobs, config.certify)

    if args.json:
        _emit_json(args, curve.to_json())
    else:
        _emit(args, curve.to_csv())

    if args.svg and curve.samples:
        write_svg(boundary_commands(curve.phis, curve.lambdas), args.svg, title="1/λ_φ")

    if curve.samples:
        logger.info(f"sup 1/λ = {curve.sup_inverse():.6f} over {len(curve)} angles")
    if curve.failures:
        logger.error(f"{len(curve.failures)} angle(s) without a solution")
        return 1
    return 0


def cmd_unimodal(args) -> int:
    with open(args.map, "r") as f:
        g = PiecewiseLinearMap.from_json(json.load(f))

    nf = normalize(g)
    entropy = entropy_cross_check(nf, args.n_max)
    data = {"input": g.to_json(), "normal_form": nf.to_json(), "entropy": entropy.to_json()}

    gap = None
    if args.epsilon is not None:
        gap = conjugate_gap_check(nf, args.epsilon)
        data["conjugate_gap"] = {"max_nonreal_modulus": gap.max_nonreal_modulus, "epsilon": gap.epsilon, "passed": gap.passed}

    if args.json:
        _emit_json(args, data)
    else:
        lines = [
            f"input: {g}",
            f"normal form: case {int(nf.case)}, {nf.map}",
            f"lap counts: {list(entropy.lap.laps)}",
            f"entropy estimate {entropy.lap.estimate:.6f}, log β = {entropy.log_beta:.6f}, gap {entropy.gap:.3g}",
        ]
        if gap is not None:
            lines.append(f"largest non-real conjugate {gap.max_nonreal_modulus:.6f} against 2 - ε = {2 - gap.epsilon:.6f}")
        _emit(args, "\n".join(lines) + "\n")

    if gap is not None and not gap.passed:
        raise VerificationFailure(0, f"non-real conjugate of modulus {gap.max_nonreal_modulus} reaches 2 - ε")
    return 0


def cmd_verify(args) -> int:
    reports = run_suites(suite_names(args.suite), quick=args.quick, seed=args.seed, jobs=args.jobs or 1)

    if args.json:
        _emit_json(args, [report.to_json() for report in reports])
    else:
        lines = []
        for report in reports:
            lines.append(str(report))
            lines.extend(f"  {failure}" for failure in report.failures)
        _emit(args, "\n".join(lines) + "\n")

    return 0 if all(report.passed for report in reports) else 1


def _read_boundary_csv(path: str) -> tuple[list[float], list[float]]:
    with open(path, "r", newline="") as f:
        rows = list(csv.DictReader(f))
    return [float(row["phi"]) for row in rows], [float(row["lambda"]) for row in rows]


def cmd_render(args) -> int:
    with open(args.input, "r") as f:
        header = f.readline().strip().split(",")

    if header == CSV_HEADER:
        commands = omega_commands(read_csv_points(args.input), args.style)
        title = "Ω"
    elif header[:2] == ["phi", "lambda"]:
        commands = boundary_commands(*_read_boundary_csv(args.input))
        title = "1/λ_φ"
    else:
        raise ValueError(f"{args.input} is neither a scan nor a boundary CSV")

    write_svg(commands, args.out, title)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gbeta-lab", description="Computational lab for generalized β-transformations")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    parser.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes for scan, boundary and verify")

    sub = parser.add_subparsers(dest="command", required=True)

    def map_args(p):
        p.add_argument("--beta", required=True, help="rational, or ascending coefficients with an interval: -1,-1,1@[1,2]")
        p.add_argument("--signs", required=True, help="sign configuration, e.g. 1,-1")

    p = sub.add_parser("expand", help="(s,d) expansion of a point")
    map_args(p)
    p.add_argument("--x", default="one", help="rational point in [0,1], or 'one'")
    p.add_argument("--max", type=int, default=DEFAULT_EXPAND_STEPS)
    p.add_argument("--out")
    p.set_defaults(run=cmd_expand)

    p = sub.add_parser("orbit", help="exact orbit listing and PCF verdict")
    map_args(p)
    p.add_argument("--x", default="one")
    p.add_argument("--max", type=int, default=DEFAULT_EXPAND_STEPS)
    p.add_argument("--max-steps", type=int, default=DEFAULT_PCF_MAX_STEPS)
    p.add_argument("--out")
    p.set_defaults(run=cmd_orbit)

    p = sub.add_parser("parry", help="Parry polynomial and its zeros")
    map_args(p)
    p.add_argument("--max-steps", type=int, default=DEFAULT_PCF_MAX_STEPS)
    p.add_argument("--out")
    p.set_defaults(run=cmd_parry)

    p = sub.add_parser("criterion", help="build, solve and verify a criterion sequence")
    p.add_argument("--m", required=True, help="M(1),...,M(n), e.g. 3,1,-1")
    p.add_argument("--free-signs", help="signs for the unconstrained entries of E")
    p.add_argument("--out")
    p.set_defaults(run=cmd_criterion)

    p = sub.add_parser("scan", help="scan conjugates into a CSV")
    p.add_argument("--config", help="JSON scan configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--mode", choices=("exhaustive", "random"))
    p.add_argument("--svg")
    p.add_argument("--style", choices=sorted(STYLES), default="default")
    p.add_argument("--envelope", action="store_true", help="check non-real conjugates against a computed λ_φ curve")
    p.add_argument("--points", type=int, default=DEFAULT_BOUNDARY_POINTS, help="angles of the envelope curve")
    p.add_argument("--trunc", type=int, default=DEFAULT_TRUNCATION)
    p.add_argument("--out")
    p.set_defaults(run=cmd_scan)

    p = sub.add_parser("boundary", help="sample λ_φ over a grid of angles")
    p.add_argument("--grid", help="lo:hi:step, e.g. 0.1:pi-0.1:0.05")
    p.add_argument("--points", type=int, default=DEFAULT_BOUNDARY_POINTS, help="evenly spaced angles when --grid is absent")
    p.add_argument("--trunc", type=int, default=DEFAULT_TRUNCATION)
    p.add_argument("--tol", type=float, default=DEFAULT_BOUNDARY_TOL)
    p.add_argument("--certify", action="store_true")
    p.add_argument("--svg")
    p.add_argument("--out")
    p.set_defaults(run=cmd_boundary)

    p = sub.add_parser("unimodal", help="normal form and entropy of a unimodal map")
    p.add_argument("--map", required=True, help="JSON file with breakpoints and values")
    p.add_argument("--n-max", type=int, default=DEFAULT_LAP_STEPS)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--out")
    p.set_defaults(run=cmd_unimodal)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--quick", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("render", help="SVG figure from a scan or boundary CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--style", choices=sorted(STYLES), default="default")
    p.set_defaults(run=cmd_render)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)

    set_verbosity(args.verbose, args.quiet)

    try:
        return args.run(args)
    except (VerificationFailure, BoundViolation) as err:
        logger.error(err)
        return 1
    except (ParsingError, ValueError, KeyError, OSError) as err:
        logger.error(err)
        return 2
    except LabError as err:
        logger.error(err)
        return 1


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
