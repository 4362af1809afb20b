"""Polynomial expression parsing.

Grammar (whitespace insignificant, juxtaposition is not multiplication)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := "-" unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER ("/" INTEGER)? | IDENTIFIER | "(" expr ")"

A fraction literal such as ``3/2`` is a single atom; ``/`` is not division.
"""

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..errors import ExpressionSyntaxError, UnknownVariableError
from ..ring import Poly

TOKEN_RE = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<number>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
)

RATIONAL_RE = re.compile(r"^\s*(?P<sign>-)?\s*(?P<num>\d+)\s*(?:/\s*(?P<den>\d+))?\s*$")


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | end
    text: str
    offset: int


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if not match:
            line, column = _position(text, pos)
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.variables = tuple(variables)
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, token: Token = None, cls=ExpressionSyntaxError):
        token = token or self.current
        line, column = _position(self.text, token.offset)
        return cls(message, line, column)

    def accept(self, op: str) -> bool:
        if self.current.kind == "op" and self.current.text == op:
            self.pos += 1
            return True
        return False

    def parse(self) -> Poly:
        if self.current.kind == "end":
            raise self.error("empty expression")
        result = self.expr()
        if self.current.kind != "end":
            token = self.current
            if token.kind in ("number", "name") or token.text == "(":
                raise self.error(
                    f"unexpected {token.text!r}; juxtaposition is not multiplication, use '*'"
                )
            raise self.error(f"unexpected {token.text!r}")
        return result

    def expr(self) -> Poly:
        result = self.term()
        while True:
            if self.accept("+"):
                result = result + self.term()
            elif self.accept("-"):
                result = result - self.term()
            else:
                return result

    def term(self) -> Poly:
        result = self.unary()
        while self.accept("*"):
            result = result * self.unary()
        return result

    def unary(self) -> Poly:
        if self.accept("-"):
            return -self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.accept("^"):
            token = self.current
            if token.kind == "op" and token.text == "-":
                raise self.error("negative exponent")
            if token.kind != "number":
                raise self.error("exponent must be a non-negative integer literal")
            self.pos += 1
            if self.current.kind == "op" and self.current.text in ("/", "^"):
                raise self.error("exponent must be a non-negative integer literal")
            return base ** int(token.text)
        return base

    def atom(self) -> Poly:
        token = self.current
        if token.kind == "number":
            self.pos += 1
            value = Fraction(int(token.text))
            if self.accept("/"):
                denominator = self.current
                if denominator.kind != "number":
                    raise self.error("fraction literal needs an integer denominator")
                if int(denominator.text) == 0:
                    raise self.error("zero denominator", denominator)
                self.pos += 1
                value = value / int(denominator.text)
            return Poly.constant(self.variables, value)
        if token.kind == "name":
            if token.text not in self.variables:
                raise self.error(
                    f"unknown variable {token.text!r}; expected one of {list(self.variables)}",
                    cls=UnknownVariableError,
                )
            self.pos += 1
            return Poly.variable(self.variables, token.text)
        if self.accept("("):
            inner = self.expr()
            if not self.accept(")"):
                raise self.error("expected ')'")
            return inner
        if token.kind == "end":
            raise self.error("unexpected end of expression")
        raise self.error(f"unexpected {token.text!r}")


def parse_poly(text: str, variables: Sequence[str]) -> Poly:
    """Parse ``text`` into a canonical Poly over ``variables``."""
    if not isinstance(text, str):
        raise ExpressionSyntaxError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text, variables).parse()


def parse_rational(text) -> Fraction:
    """Parse an exact rational literal such as ``"-3/2"``; ints pass through."""
    if isinstance(text, bool):
        raise ExpressionSyntaxError(f"not a rational literal: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ExpressionSyntaxError(
            f"numbers must be strings or integers, got {type(text).__name__} {text!r}"
        )
    match = RATIONAL_RE.match(text)
    if not match:
        raise ExpressionSyntaxError(f"not a rational literal: {text!r}")
    numerator = int(match.group("num"))
    denominator = int(match.group("den") or 1)
    if denominator == 0:
        raise ExpressionSyntaxError(f"zero denominator in {text!r}")
    value = Fraction(numerator, denominator)
    return -value if match.group("sign") else value
