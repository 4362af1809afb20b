"""Exact multivariate polynomials over the rationals in a fixed list of base variables.

A ``Poly`` is immutable: a variable tuple plus a map from exponent tuples to
nonzero ``Fraction`` coefficients. Canonical printing uses graded
lexicographic order, highest degree first.
"""

import math
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import StructuralError

Rational = Fraction
Exponent = tuple[int, ...]
Scalar = Union[int, Fraction]

# degree of the zero polynomial
MINUS_INFINITY = -math.inf


def as_rational(value) -> Fraction:
    """Coerce an exact scalar; floats and bools are rejected."""
    if isinstance(value, bool) or not isinstance(value, (int, Fraction)):
        raise TypeError(f"not an exact rational: {value!r}")
    return Fraction(value)


def _add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


def _grlex_key(exponent: Exponent):
    return (sum(exponent), exponent)


class Poly:
    __slots__ = ("variables", "_terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Optional[Mapping[Exponent, Scalar]] = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        cleaned: dict[Exponent, Fraction] = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(exponent)
            if len(exponent) != n or any((not isinstance(e, int)) or e < 0 for e in exponent):
                raise StructuralError(f"bad exponent {exponent!r} for variables {self.variables}")
            value = as_rational(coeff)
            if value:
                cleaned[exponent] = cleaned.get(exponent, Fraction(0)) + value
                if not cleaned[exponent]:
                    del cleaned[exponent]
        self._terms = cleaned
        self._hash = None

    @classmethod
    def _raw(cls, variables: tuple[str, ...], terms: dict[Exponent, Fraction]) -> "Poly":
        # terms must already be canonical (no zero coefficients)
        p = cls.__new__(cls)
        p.variables = variables
        p._terms = terms
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Poly":
        return cls._raw(tuple(variables), {})

    @classmethod
    def constant(cls, variables: Sequence[str], value: Scalar) -> "Poly":
        variables = tuple(variables)
        value = as_rational(value)
        return cls._raw(variables, {(0,) * len(variables): value} if value else {})

    @classmethod
    def variable(cls, variables: Sequence[str], which: Union[int, str]) -> "Poly":
        variables = tuple(variables)
        index = variables.index(which) if isinstance(which, str) else which
        if not 0 <= index < len(variables):
            raise StructuralError(f"variable index {index} out of range for {variables}")
        exponent = tuple(1 if k == index else 0 for k in range(len(variables)))
        return cls._raw(variables, {exponent: Fraction(1)})

    # -- inspection -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return MappingProxyType(self._terms)

    def monomials(self) -> list[tuple[Exponent, Fraction]]:
        """Terms in canonical (graded lex, descending) order."""
        return sorted(self._terms.items(), key=lambda item: _grlex_key(item[0]), reverse=True)

    def coefficient(self, exponent: Exponent) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    def degree(self):
        """Total degree; ``MINUS_INFINITY`` for the zero polynomial."""
        if not self._terms:
            return MINUS_INFINITY
        return max(sum(e) for e in self._terms)

    @property
    def total_degree(self) -> int:
        """Total degree with the zero polynomial reported as -1."""
        return -1 if not self._terms else max(sum(e) for e in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.n, Fraction(0))

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise StructuralError(
                    f"variable lists differ: {self.variables} vs {other.variables}"
                )
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for exponent, coeff in other._terms.items():
            value = terms.get(exponent, 0) + coeff
            if value:
                terms[exponent] = value
            else:
                terms.pop(exponent, None)
        return Poly._raw(self.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.variables, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return Poly.zero(self.variables)
            return Poly._raw(self.variables, {e: c * other for e, c in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exponent = _add_exponents(e1, e2)
                terms[exponent] = terms.get(exponent, 0) + c1 * c2
        return Poly._raw(self.variables, {e: c for e, c in terms.items() if c})

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if not isinstance(exponent, int) or exponent < 0:
            raise StructuralError(f"exponent must be a non-negative integer, got {exponent!r}")
        result = Poly.constant(self.variables, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.variables == other.variables and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self._terms == Poly.constant(self.variables, other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- calculus and substitution ---------------------------------------

    def partial(self, i: int) -> "Poly":
        if not 0 <= i < self.n:
            raise StructuralError(f"variable index {i} out of range for {self.variables}")
        terms = {}
        for exponent, coeff in self._terms.items():
            power = exponent[i]
            if power:
                lowered = exponent[:i] + (power - 1,) + exponent[i + 1:]
                terms[lowered] = coeff * power
        return Poly._raw(self.variables, terms)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        if len(point) != self.n:
            raise StructuralError(f"point has length {len(point)}, expected {self.n}")
        values = [as_rational(v) for v in point]
        total = Fraction(0)
        for exponent, coeff in self._terms.items():
            term = coeff
            for value, power in zip(values, exponent):
                if power:
                    term *= value ** power
            total += term
        return total

    def compose(self, maps: Sequence["Poly"], variables: Optional[Sequence[str]] = None) -> "Poly":
        """Substitute ``x_i -> maps[i]``; ``variables`` names the target ring when ``maps`` is empty."""
        if len(maps) != self.n:
            raise StructuralError(f"compose needs {self.n} maps, got {len(maps)}")
        if maps:
            target = maps[0].variables
            if any(m.variables != target for m in maps):
                raise StructuralError("compose maps must share one variable list")
        elif variables is not None:
            target = tuple(variables)
        else:
            raise StructuralError("compose of a constant polynomial needs target variables")
        powers: list[dict[int, Poly]] = [{} for _ in maps]

        def power_of(i: int, k: int) -> Poly:
            cache = powers[i]
            if k not in cache:
                cache[k] = maps[i] ** k
            return cache[k]

        result = Poly.zero(target)
        for exponent, coeff in self._terms.items():
            term = Poly.constant(target, coeff)
            for i, k in enumerate(exponent):
                if k:
                    term = term * power_of(i, k)
            result = result + term
        return result

    def shift(self, point: Sequence[Scalar]) -> "Poly":
        """Re-express in shifted coordinates: the result at ``y`` is ``self(y + point)``."""
        if len(point) != self.n:
            raise StructuralError(f"point has length {len(point)}, expected {self.n}")
        maps = [
            Poly.variable(self.variables, i) + as_rational(p) for i, p in enumerate(point)
        ]
        return self.compose(maps, self.variables)

    def truncate(self, order: int) -> "Poly":
        return Poly._raw(
            self.variables, {e: c for e, c in self._terms.items() if sum(e) <= order}
        )

    def map_coefficients(self, fn) -> "Poly":
        return Poly(self.variables, {e: fn(c) for e, c in self._terms.items()})

    # -- printing ---------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for exponent, coeff in self.monomials():
            factors = []
            for name, power in zip(self.variables, exponent):
                if power == 1:
                    factors.append(name)
                elif power > 1:
                    factors.append(f"{name}^{power}")
            magnitude = abs(coeff)
            if not factors:
                body = str(magnitude)
            elif magnitude == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(magnitude)] + factors)
            if not pieces:
                pieces.append(f"-{body}" if coeff < 0 else body)
            else:
                pieces.append(f" - {body}" if coeff < 0 else f" + {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, variables={list(self.variables)!r})"


def poly_arith(a: Poly, b: Poly, op: str) -> Poly:
    if a.variables != b.variables:
        raise StructuralError(f"variable lists differ: {a.variables} vs {b.variables}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}; expected add, sub or mul")


def partial(p: Poly, i: int) -> Poly:
    return p.partial(i)


def evaluate(p: Poly, point: Sequence[Scalar]) -> Fraction:
    return p.evaluate(point)


def compose(p: Poly, maps: Sequence[Poly], variables: Optional[Sequence[str]] = None) -> Poly:
    return p.compose(maps, variables)


def jacobian(polys: Sequence[Poly], point: Sequence[Scalar]) -> list[list[Fraction]]:
    """Exact Jacobian matrix (rows = polys, columns = variables) at ``point``."""
    return [[p.partial(i).evaluate(point) for i in range(p.n)] for p in polys]


def monomials_up_to(n: int, degree: int) -> list[Exponent]:
    """All exponent vectors in ``n`` variables of total degree <= ``degree``, graded lex ascending."""
    if degree < 0:
        return []
    result: list[Exponent] = []
    for total in range(degree + 1):
        result.extend(sorted(_compositions(n, total)))
    return result


def _compositions(n: int, total: int) -> Iterable[Exponent]:
    if n == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(n - 1, total - first):
            yield (first,) + rest
