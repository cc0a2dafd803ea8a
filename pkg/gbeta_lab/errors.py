from typing import Optional, Sequence


class LabError(Exception):
    """Base class for every error raised by gbeta_lab."""


class ParsingError(LabError):
    expected: str
    index: int
    context: str

    def __init__(self, expected: str, index: int, context: str) -> None:
        self.expected = expected
        self.index = index
        self.context = context

        message = f"Expected {self.expected} at index {self.index} but found: {self.context!r}"

        super().__init__(message)


class RingMismatch(LabError, TypeError):
    def __init__(self) -> None:
        super().__init__("Elements belong to Z[β] rings of different β")


class NonConvergence(LabError):
    degree: int
    precision: int
    steps: int

    def __init__(self, degree: int, precision: int, steps: int) -> None:
        self.degree = degree
        self.precision = precision
        self.steps = steps

        super().__init__(
            f"Root iteration for a degree {degree} polynomial did not converge "
            f"in {steps} steps at {precision} bits"
        )


class OutOfRange(LabError, ValueError):
    def __init__(self, value, lower, upper) -> None:
        self.value = value
        self.lower = lower
        self.upper = upper

        super().__init__(f"{value} is outside [{lower}, {upper}]")


class InvalidSymbol(LabError, ValueError):
    def __init__(self, symbol: int, m: int) -> None:
        self.symbol = symbol
        self.m = m

        super().__init__(f"Symbol {symbol} is not in {{0, …, {m}}}")


class InvalidMap(LabError, ValueError):
    pass


class NotFinite(LabError):
    def __init__(self, shape) -> None:
        self.shape = shape
        super().__init__(f"Expected a finite expansion, got {shape}")


class NotInfinite(LabError):
    def __init__(self, shape) -> None:
        self.shape = shape
        super().__init__(f"Expected a periodic or preperiodic expansion, got {shape}")


class InsideDisk(LabError, ValueError):
    def __init__(self, modulus: float) -> None:
        self.modulus = modulus
        super().__init__(f"|z| = {modulus} must exceed 1")


class OutsideDisk(LabError, ValueError):
    def __init__(self, modulus: float) -> None:
        self.modulus = modulus
        super().__init__(f"|w| = {modulus} must be below 1")


class HypothesisViolation(LabError, ValueError):
    clauses: list[str]

    def __init__(self, clauses: Sequence[str], M: Optional[Sequence[int]] = None) -> None:
        self.clauses = list(clauses)
        self.M = tuple(M) if M is not None else None

        subject = f"M = {self.M}" if self.M is not None else "criterion"
        super().__init__(f"{subject} violates: " + "; ".join(self.clauses))


class IsolationFailure(LabError):
    def __init__(self, interval, detail: str = "") -> None:
        self.interval = interval
        message = f"No root isolated strictly inside ({interval[0]}, {interval[1]})"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class VerificationFailure(LabError):
    def __init__(self, index: int, clause: str) -> None:
        self.index = index
        self.clause = clause
        super().__init__(f"Verification failed at index {index}: {clause}")


class BoundViolation(LabError):
    def __init__(self, offenders: Sequence, limit: float) -> None:
        self.offenders = list(offenders)
        self.limit = limit
        super().__init__(f"{len(self.offenders)} record(s) reach modulus {limit} or more")


class NoRoot(LabError):
    def __init__(self, phi: float, grid: Sequence[float]) -> None:
        self.phi = phi
        self.grid = tuple(grid)
        super().__init__(f"No zero found along angle {phi} on bracket {self.grid}")


class NotUnimodal(LabError, ValueError):
    pass


class NotUniform(LabError, ValueError):
    pass


class NotExpanding(LabError, ValueError):
    pass


class NotPostCriticallyFinite(LabError, ValueError):
    pass


class ExplodedBreakpointCount(LabError):
    def __init__(self, count: int, cap: int) -> None:
        self.count = count
        self.cap = cap
        super().__init__(f"{count} distinct image intervals exceed the cap of {cap}")
