from fractions import Fraction
import math

import pytest

from gbeta_lab.errors import ParsingError
from gbeta_lab.parsing import linspace_grid, parse_beta, parse_grid, parse_int_list, parse_rational, parse_signs


def test_rational_beta():
    assert parse_beta("5/2").lo == Fraction(5, 2)
    assert parse_beta(" 2 ").is_exact
    assert parse_beta("2.5").hi == Fraction(5, 2)


def test_algebraic_beta():
    beta = parse_beta("-1,-1,1@[1,2]")

    assert beta.defining.coeffs == (-1, -1, 1)
    assert float(beta) == pytest.approx((1 + math.sqrt(5)) / 2)
    assert float(parse_beta("-1, -1, 1 @ [1, 2]")) == pytest.approx(float(beta))


@pytest.mark.parametrize(
    "text",
    [
        "-1,-1,1@[-2,2]",
        "1.5,2",
        "1.5,2@[1,2]",
        "1,2@[",
        "-1,-1,1@[1,2] extra",
        "",
    ],
)
def test_bad_beta(text):
    with pytest.raises(ParsingError):
        parse_beta(text)


def test_error_reports_position():
    with pytest.raises(ParsingError) as info:
        parse_int_list("3,1,x")

    assert info.value.index == 4
    assert info.value.expected == "digits"


def test_int_list():
    assert parse_int_list("3, 1, -1") == [3, 1, -1]
    assert parse_int_list("+2") == [2]


def test_signs():
    assert parse_signs("1,-1") == [1, -1]

    with pytest.raises(ParsingError):
        parse_signs("1,2")


def test_rationals():
    assert parse_rational("0.25") == Fraction(1, 4)
    assert parse_rational("-3/4") == Fraction(-3, 4)

    with pytest.raises(ParsingError):
        parse_rational("3/0")


def test_grid_with_pi():
    grid = parse_grid("0.1:pi-0.1:0.5")

    assert len(grid) == 6
    assert grid[0] == pytest.approx(0.1)
    assert grid[-1] == pytest.approx(2.6)
    assert parse_grid("0:2pi:pi") == pytest.approx([0, math.pi, 2 * math.pi])
    assert parse_grid("0:1:0.25") == pytest.approx([0, 0.25, 0.5, 0.75, 1])


def test_bad_grid():
    with pytest.raises(ParsingError):
        parse_grid("1:0:0.1")

    with pytest.raises(ParsingError):
        parse_grid("0:1")


def test_linspace():
    assert linspace_grid(0, 1, 5) == pytest.approx([0, 0.25, 0.5, 0.75, 1])
    assert linspace_grid(0.3, 1, 1) == [0.3]
