from dataclasses import asdict, dataclass, field, fields, replace
import json
from pathlib import Path
from typing import Optional, Union


# Exact arithmetic and root finding
DEFAULT_PRECISION_BITS = 128
ROOT_RETRIES = 2
ROOT_BASE_STEPS = 50
ROOT_STEPS_PER_DEGREE = 20
ROOT_INIT_ANGLE = 0.4
INITIAL_ENCLOSURE_BITS = 64
GCD_CHECK_WIDTH_BITS = 256

# Generalized β-transformations
DEFAULT_PCF_MAX_STEPS = 10_000
DEFAULT_EXPAND_STEPS = 64

# Parry polynomials and identities
DEFAULT_SERIES_TERMS = 400
IDENTITY_ABS_TOL = 1e-8
FACTOR_ABS_TOL = 1e-10

# Conjugate scans
MODULUS_LIMIT = 2.0
GOLDEN_BOUND = (1 + 5**0.5) / 2
NONREAL_SOFT_LIMIT = 1.6
REAL_TOLERANCE = 1e-12
ENVELOPE_TOLERANCE = 1e-3
MAX_SVG_BYTES = 8 * 1024 * 1024

# Boundary curve
DEFAULT_TRUNCATION = 400
DEFAULT_BOUNDARY_TOL = 1e-12
LAMBDA_BRACKET = (0.5, 0.999)
WARM_START_RADIUS = 0.02
MINIMALITY_RESOLUTION = 1e-3
CONTINUITY_SLOPE = 1.0
GAP_MAX_STEPS = 200
TIE_TOLERANCE = 1e-12

# Unimodal maps
LAP_INTERVAL_CAP = 4096
TRIM_MAX_STEPS = 64
DEFAULT_LAP_STEPS = 16


SCAN_MODES = ("exhaustive", "random")


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    return value


@dataclass(frozen=True)
class ScanConfig:
    n_range: tuple[int, int] = (2, 4)
    coefficient_bound: int = 12
    sample_count: int = 100
    seed: int = 0
    mode: str = "random"
    criterion_sources: tuple[tuple[int, ...], ...] = field(default=())
    classical_sources: tuple[tuple[int, ...], ...] = field(default=())
    classical_share: float = 0.2
    jobs: int = 1
    svg_path: Optional[str] = None

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _tupled(getattr(self, f.name)))

        if self.mode not in SCAN_MODES:
            raise ValueError(f"Unknown scan mode {self.mode!r}, expected one of {SCAN_MODES}")
        if len(self.n_range) != 2:
            raise ValueError(f"n_range must be [lo, hi], got {self.n_range}")
        if self.sample_count < 0:
            raise ValueError("sample_count must be non-negative")
        if self.coefficient_bound < 2:
            raise ValueError("coefficient_bound must be at least 2")
        if not 0.0 <= self.classical_share <= 1.0:
            raise ValueError("classical_share must lie in [0, 1]")

    @property
    def explicit(self) -> bool:
        return bool(self.criterion_sources or self.classical_sources)

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "ScanConfig":
        with open(path, "r") as f:
            data = json.load(f)

        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"Unknown scan config keys: {sorted(unknown)}")

        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def with_overrides(self, **flags) -> "ScanConfig":
        return replace(self, **{k: v for k, v in flags.items() if v is not None})


@dataclass(frozen=True)
class BoundaryConfig:
    grid: tuple[float, ...]
    truncation: int = DEFAULT_TRUNCATION
    tol: float = DEFAULT_BOUNDARY_TOL
    jobs: int = 1
    certify: bool = False
