from fractions import Fraction

import pytest

from dg_atiyah.errors import ExpressionSyntaxError, UnknownVariableError
from dg_atiyah.utils.expression_parser import parse_poly, parse_rational

XY = ("x1", "x2")


def test_fraction_literals_are_atoms() -> None:
    assert parse_poly("3/2*x1", XY).coefficient((1, 0)) == Fraction(3, 2)
    assert parse_poly("1/3", XY) == parse_poly("2/6", XY)
    assert parse_poly("x1 - 1/2", XY).constant_term() == Fraction(-1, 2)


def test_unary_minus_binds_looser_than_power() -> None:
    assert parse_poly("-x1^2", XY) == -parse_poly("x1*x1", XY)
    assert parse_poly("(-x1)^2", XY) == parse_poly("x1*x1", XY)


def test_parentheses_and_precedence() -> None:
    assert parse_poly("2*(x1 + x2)^2 - x1", XY) == parse_poly("2*x1^2 + 4*x1*x2 + 2*x2^2 - x1", XY)


def test_juxtaposition_is_rejected_with_position() -> None:
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_poly("2 x1", XY)
    assert info.value.column == 3
    assert "juxtaposition" in str(info.value)


def test_unknown_variable() -> None:
    with pytest.raises(UnknownVariableError) as info:
        parse_poly("x1 + y", XY)
    assert info.value.line == 1
    assert info.value.column == 6


@pytest.mark.parametrize("text", ["", "x1 +", "x1^-1", "x1^x2", "x1^1/2", "1/0", "(x1", "x1 $ x2"])
def test_malformed_expressions(text: str) -> None:
    with pytest.raises(ExpressionSyntaxError):
        parse_poly(text, XY)


def test_errors_report_line_and_column() -> None:
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_poly("x1 +\n  ?", XY)
    assert (info.value.line, info.value.column) == (2, 3)


def test_parse_rational() -> None:
    assert parse_rational("-3/2") == Fraction(-3, 2)
    assert parse_rational(4) == 4
    assert parse_rational(" 7 ") == 7
    for bad in [0.5, True, "1.5", "1/0", "x"]:
        with pytest.raises(ExpressionSyntaxError):
            parse_rational(bad)
