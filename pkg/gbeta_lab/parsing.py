from fractions import Fraction
import math

from gbeta_lab.algebraic import AlgebraicReal, IntPolynomial
from gbeta_lab.errors import ParsingError
from gbeta_lab.logger import get_logger

logger = get_logger(__name__)


class ValueParser:
    """Cursor parser for the value syntax accepted on the command line.

    β:      `2`, `5/2`, or ascending coefficients with an interval,
            `-1,-1,1@[1,2]`
    words:  `3,1,-1`
    grids:  `0.1:pi-0.1:0.05`
    """

    def __init__(self, source: str) -> None:
        self.source = source
        self._index = 0

    def _create_error(self, expected: str):
        start = max(self._index - 10, 0)
        end = min(self._index + 10, len(self.source))

        return ParsingError(expected, self._index, self.source[start:end])

    @property
    def _is_not_finished(self):
        return self._index < len(self.source)

    @property
    def _char(self):
        return self.source[self._index]

    def _whitespace(self):
        while self._is_not_finished and self._char.isspace():
            self._index += 1

    def _peek(self, chars: str) -> bool:
        return self._is_not_finished and self._char in chars

    def _literal(self, literal: str):
        if not self.source.startswith(literal, self._index):
            raise self._create_error(repr(literal))

        self._index += len(literal)

    def _digits(self) -> str:
        start = self._index

        while self._is_not_finished and self._char.isdigit():
            self._index += 1

        if not self._index > start:
            raise self._create_error("digits")

        return self.source[start : self._index]

    def _signed(self) -> str:
        sign = ""
        if self._peek("+-"):
            sign = "-" if self._char == "-" else ""
            self._index += 1
        return sign

    def integer(self) -> int:
        self._whitespace()
        sign = self._signed()
        return int(sign + self._digits())

    def rational(self) -> Fraction:
        self._whitespace()
        sign = self._signed()
        text = self._digits()

        if self._peek("."):
            self._index += 1
            text += "." + self._digits()
        elif self._peek("/"):
            self._index += 1
            denominator = int(self._digits())
            if denominator == 0:
                raise self._create_error("non-zero denominator")
            return Fraction(int(sign + text), denominator)

        return Fraction(sign + text)

    def integer_list(self) -> list[int]:
        values = [self.integer()]
        self._whitespace()

        while self._peek(","):
            self._literal(",")
            values.append(self.integer())
            self._whitespace()

        return values

    def _scalar_term(self) -> float:
        self._whitespace()
        if self.source.startswith("pi", self._index):
            self._literal("pi")
            return math.pi

        value = float(self.rational())
        self._whitespace()
        if self._peek("*"):
            self._literal("*")
            self._whitespace()
            self._literal("pi")
            return value * math.pi
        if self.source.startswith("pi", self._index):
            self._literal("pi")
            return value * math.pi
        return value

    def scalar(self) -> float:
        value = self._scalar_term()
        self._whitespace()

        while self._peek("+-"):
            op = self._char
            self._index += 1
            term = self._scalar_term()
            value = value + term if op == "+" else value - term
            self._whitespace()

        return value

    def beta(self) -> AlgebraicReal:
        start = self._index
        self._whitespace()

        values = [self.rational()]
        self._whitespace()
        while self._peek(","):
            self._literal(",")
            values.append(self.rational())
            self._whitespace()

        if not self._peek("@"):
            if len(values) != 1:
                raise self._create_error("'@[lo,hi]' after the coefficient list")
            return AlgebraicReal.rational(values[0])

        if any(v.denominator != 1 for v in values):
            self._index = start
            raise self._create_error("integer coefficients")

        self._literal("@")
        self._whitespace()
        self._literal("[")
        lo = self.rational()
        self._whitespace()
        self._literal(",")
        hi = self.rational()
        self._whitespace()
        self._literal("]")

        try:
            return AlgebraicReal(IntPolynomial(tuple(int(v) for v in values)), lo, hi)
        except ValueError as err:
            logger.debug(err)
            raise self._create_error("an interval isolating exactly one root")

    def grid(self) -> list[float]:
        lo = self.scalar()
        self._literal(":")
        hi = self.scalar()
        self._literal(":")
        step = self.scalar()

        if step <= 0 or hi < lo:
            raise self._create_error("lo <= hi and a positive step")

        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [lo + i * step for i in range(count)]

    def finish(self):
        self._whitespace()
        if self._is_not_finished:
            raise self._create_error("end of input")


def _parse_all(text: str, method: str):
    parser = ValueParser(text)
    value = getattr(parser, method)()
    parser.finish()
    return value


def parse_beta(text: str) -> AlgebraicReal:
    return _parse_all(text, "beta")


def parse_rational(text: str) -> Fraction:
    return _parse_all(text, "rational")


def parse_int_list(text: str) -> list[int]:
    return _parse_all(text, "integer_list")


def parse_signs(text: str) -> list[int]:
    values = parse_int_list(text)
    for i, value in enumerate(values):
        if value not in (1, -1):
            raise ParsingError("+1 or -1", i, text)
    return values


def parse_grid(text: str) -> list[float]:
    return _parse_all(text, "grid")


def linspace_grid(lo: float, hi: float, count: int) -> list[float]:
    if count < 2:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


if __name__ == "__main__":
    print(parse_beta("-1,-1,1@[1,2]"))
    print(parse_grid("0.1:pi-0.1:0.5"))
