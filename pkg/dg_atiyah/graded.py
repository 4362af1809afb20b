"""Functions and vector fields on the graded manifold E[-1].

Functions are elements of Poly[x] (x) Lambda[xi^1..xi^m]; each xi has degree -1.
A vector field is stored by its action on the generators: ``x_components[i]``
is V(x^i) and ``xi_components[k]`` is V(xi^k). Indices are 0-based.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Union

from .errors import StructuralError
from .ring import Poly, Scalar, jacobian

XiKey = tuple[int, ...]
BasisField = tuple[str, int]  # ("x", i) = d/dx^i, ("xi", k) = d/dxi^k


def _merge_sign(left: XiKey, right: XiKey) -> int:
    """Sign of sorting the concatenation of two increasing, disjoint index tuples."""
    inversions = 0
    for a in left:
        for b in right:
            if a > b:
                inversions += 1
    return -1 if inversions % 2 else 1


class SuperFunction:
    __slots__ = ("variables", "m", "_terms")

    def __init__(self, variables: Sequence[str], m: int, terms: Optional[Mapping[XiKey, Poly]] = None):
        self.variables = tuple(variables)
        self.m = m
        cleaned: dict[XiKey, Poly] = {}
        for key, coeff in (terms or {}).items():
            key = tuple(key)
            if any(b <= a for a, b in zip(key, key[1:])) or any(not 0 <= k < m for k in key):
                raise StructuralError(f"xi key {key!r} is not strictly increasing in range({m})")
            if not isinstance(coeff, Poly):
                coeff = Poly.constant(self.variables, coeff)
            if coeff.variables != self.variables:
                raise StructuralError(f"coefficient over {coeff.variables}, expected {self.variables}")
            if coeff:
                cleaned[key] = coeff
        self._terms = cleaned

    @classmethod
    def _raw(cls, variables: tuple[str, ...], m: int, terms: dict[XiKey, Poly]) -> "SuperFunction":
        f = cls.__new__(cls)
        f.variables = variables
        f.m = m
        f._terms = terms
        return f

    @classmethod
    def zero(cls, variables: Sequence[str], m: int) -> "SuperFunction":
        return cls._raw(tuple(variables), m, {})

    @classmethod
    def from_poly(cls, p: Poly, m: int) -> "SuperFunction":
        return cls._raw(p.variables, m, {(): p} if p else {})

    @classmethod
    def constant(cls, variables: Sequence[str], m: int, value: Scalar) -> "SuperFunction":
        return cls.from_poly(Poly.constant(variables, value), m)

    @classmethod
    def xi(cls, variables: Sequence[str], m: int, k: int) -> "SuperFunction":
        if not 0 <= k < m:
            raise StructuralError(f"xi index {k} out of range({m})")
        return cls._raw(tuple(variables), m, {(k,): Poly.constant(variables, 1)})

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def terms(self) -> Mapping[XiKey, Poly]:
        return MappingProxyType(self._terms)

    def body(self) -> Poly:
        """The xi-free part."""
        return self._terms.get((), Poly.zero(self.variables))

    def _check(self, other: "SuperFunction"):
        if other.variables != self.variables or other.m != self.m:
            raise StructuralError(
                f"superfunction spaces differ: ({self.variables}, m={self.m}) vs "
                f"({other.variables}, m={other.m})"
            )

    def _coerce(self, other) -> "SuperFunction":
        if isinstance(other, SuperFunction):
            self._check(other)
            return other
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise StructuralError(f"poly over {other.variables}, expected {self.variables}")
            return SuperFunction.from_poly(other, self.m)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return SuperFunction.constant(self.variables, self.m, other)
        return NotImplemented

    def __add__(self, other) -> "SuperFunction":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            total = terms[key] + coeff if key in terms else coeff
            if total:
                terms[key] = total
            else:
                terms.pop(key, None)
        return SuperFunction._raw(self.variables, self.m, terms)

    __radd__ = __add__

    def __neg__(self) -> "SuperFunction":
        return SuperFunction._raw(self.variables, self.m, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other) -> "SuperFunction":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "SuperFunction":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other) -> "SuperFunction":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            if not other:
                return SuperFunction.zero(self.variables, self.m)
            return SuperFunction._raw(
                self.variables, self.m, {k: c * other for k, c in self._terms.items()}
            )
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[XiKey, Poly] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                if set(k1) & set(k2):
                    continue
                key = tuple(sorted(k1 + k2))
                product = c1 * c2
                if _merge_sign(k1, k2) < 0:
                    product = -product
                terms[key] = terms[key] + product if key in terms else product
        return SuperFunction._raw(self.variables, self.m, {k: c for k, c in terms.items() if c})

    def __rmul__(self, other) -> "SuperFunction":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self

    def __eq__(self, other) -> bool:
        if isinstance(other, SuperFunction):
            return (self.variables, self.m, self._terms) == (other.variables, other.m, other._terms)
        if isinstance(other, (Poly, int, Fraction)) and not isinstance(other, bool):
            coerced = self._coerce(other)
            return self._terms == coerced._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.variables, self.m, frozenset(self._terms.items())))

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- grading ----------------------------------------------------------

    def degree_parts(self) -> dict[int, "SuperFunction"]:
        parts: dict[int, dict[XiKey, Poly]] = {}
        for key, coeff in self._terms.items():
            parts.setdefault(-len(key), {})[key] = coeff
        return {
            d: SuperFunction._raw(self.variables, self.m, terms) for d, terms in sorted(parts.items())
        }

    def is_homogeneous(self) -> bool:
        return len({len(key) for key in self._terms}) <= 1

    @property
    def degree(self) -> Optional[int]:
        """Degree of a homogeneous function; ``None`` for zero."""
        sizes = {len(key) for key in self._terms}
        if not sizes:
            return None
        if len(sizes) > 1:
            raise StructuralError("superfunction is not homogeneous")
        return -sizes.pop()

    # -- derivatives ------------------------------------------------------

    def partial_x(self, i: int) -> "SuperFunction":
        terms = {}
        for key, coeff in self._terms.items():
            d = coeff.partial(i)
            if d:
                terms[key] = d
        return SuperFunction._raw(self.variables, self.m, terms)

    def partial_xi(self, k: int) -> "SuperFunction":
        """Left derivative: removing the slot at 0-based position j gives sign (-1)^j."""
        if not 0 <= k < self.m:
            raise StructuralError(f"xi index {k} out of range({self.m})")
        terms = {}
        for key, coeff in self._terms.items():
            if k in key:
                j = key.index(k)
                reduced = key[:j] + key[j + 1:]
                terms[reduced] = -coeff if j % 2 else coeff
        return SuperFunction._raw(self.variables, self.m, terms)

    def map_coefficients(self, fn) -> "SuperFunction":
        return SuperFunction(self.variables, self.m, {k: fn(c) for k, c in self._terms.items()})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for key in sorted(self._terms, key=lambda k: (len(k), k)):
            coeff = self._terms[key]
            xi = "*".join(f"xi{k + 1}" for k in key)
            if not xi:
                text = f"({coeff})"
            elif coeff == 1:
                text = xi
            elif coeff == -1:
                text = f"-{xi}"
            else:
                text = f"({coeff})*{xi}"
            if pieces and text.startswith("-"):
                pieces.append(f" - {text[1:]}")
            elif pieces:
                pieces.append(f" + {text}")
            else:
                pieces.append(text)
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"SuperFunction({str(self)!r})"


@dataclass(frozen=True)
class Section:
    """A section s = s^1 e_1 + ... + s^m e_m of the trivial bundle over R^n."""

    variables: tuple[str, ...]
    components: tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "components", tuple(self.components))
        for p in self.components:
            if p.variables != self.variables:
                raise StructuralError(f"section component over {p.variables}, expected {self.variables}")

    @property
    def n(self) -> int:
        return len(self.variables)

    @property
    def m(self) -> int:
        return len(self.components)

    def evaluate(self, point: Sequence[Scalar]) -> tuple[Fraction, ...]:
        return tuple(p.evaluate(point) for p in self.components)

    def vanishes_at(self, point: Sequence[Scalar]) -> bool:
        return not any(self.evaluate(point))

    def jacobian(self, point: Sequence[Scalar]) -> list[list[Fraction]]:
        return jacobian(self.components, point)

    def max_degree(self) -> int:
        return max((p.total_degree for p in self.components), default=-1)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.components) + ")"


class GradedVectorField:
    __slots__ = ("variables", "m", "x_components", "xi_components")

    def __init__(
        self,
        variables: Sequence[str],
        m: int,
        x_components: Sequence[SuperFunction],
        xi_components: Sequence[SuperFunction],
    ):
        self.variables = tuple(variables)
        self.m = m
        if len(x_components) != len(self.variables) or len(xi_components) != m:
            raise StructuralError(
                f"field needs {len(self.variables)} x-components and {m} xi-components, "
                f"got {len(x_components)} and {len(xi_components)}"
            )
        for f in list(x_components) + list(xi_components):
            if f.variables != self.variables or f.m != m:
                raise StructuralError("field component lives on a different graded manifold")
        self.x_components = tuple(x_components)
        self.xi_components = tuple(xi_components)

    @classmethod
    def zero(cls, variables: Sequence[str], m: int) -> "GradedVectorField":
        z = SuperFunction.zero(variables, m)
        return cls(variables, m, [z] * len(tuple(variables)), [z] * m)

    @classmethod
    def coordinate(cls, variables: Sequence[str], m: int, i: int) -> "GradedVectorField":
        """d/dx^i."""
        variables = tuple(variables)
        z = SuperFunction.zero(variables, m)
        one = SuperFunction.constant(variables, m, 1)
        xs = [one if j == i else z for j in range(len(variables))]
        return cls(variables, m, xs, [z] * m)

    @classmethod
    def fiber(cls, variables: Sequence[str], m: int, k: int) -> "GradedVectorField":
        """d/dxi^k, which equals iota of the frame vector e_k."""
        variables = tuple(variables)
        z = SuperFunction.zero(variables, m)
        one = SuperFunction.constant(variables, m, 1)
        return cls(variables, m, [z] * len(variables), [one if j == k else z for j in range(m)])

    @classmethod
    def basis(cls, variables: Sequence[str], m: int, which: BasisField) -> "GradedVectorField":
        kind, index = which
        if kind == "x":
            return cls.coordinate(variables, m, index)
        if kind == "xi":
            return cls.fiber(variables, m, index)
        raise StructuralError(f"unknown basis field kind {kind!r}")

    @property
    def n(self) -> int:
        return len(self.variables)

    def _check(self, other: Union["GradedVectorField", SuperFunction]):
        if other.variables != self.variables or other.m != self.m:
            raise StructuralError(
                f"dimension mismatch: ({self.variables}, m={self.m}) vs ({other.variables}, m={other.m})"
            )

    def components(self) -> tuple[SuperFunction, ...]:
        return self.x_components + self.xi_components

    def _zip(self, other: "GradedVectorField", op) -> "GradedVectorField":
        self._check(other)
        return GradedVectorField(
            self.variables,
            self.m,
            [op(a, b) for a, b in zip(self.x_components, other.x_components)],
            [op(a, b) for a, b in zip(self.xi_components, other.xi_components)],
        )

    def __add__(self, other: "GradedVectorField") -> "GradedVectorField":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "GradedVectorField") -> "GradedVectorField":
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> "GradedVectorField":
        return self.scale(-1)

    def scale(self, f: Union[SuperFunction, Poly, Scalar]) -> "GradedVectorField":
        """Left multiplication f * V (components f * V(z))."""
        return GradedVectorField(
            self.variables,
            self.m,
            [_left(f, c) for c in self.x_components],
            [_left(f, c) for c in self.xi_components],
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedVectorField):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.m == other.m
            and self.x_components == other.x_components
            and self.xi_components == other.xi_components
        )

    def __hash__(self) -> int:
        return hash((self.variables, self.m, self.x_components, self.xi_components))

    def __bool__(self) -> bool:
        return any(self.x_components) or any(self.xi_components)

    def apply(self, f: SuperFunction) -> SuperFunction:
        self._check(f)
        result = SuperFunction.zero(self.variables, self.m)
        for i, coeff in enumerate(self.x_components):
            if coeff:
                result = result + coeff * f.partial_x(i)
        for k, coeff in enumerate(self.xi_components):
            if coeff:
                result = result + coeff * f.partial_xi(k)
        return result

    def degree_parts(self) -> dict[int, "GradedVectorField"]:
        """Homogeneous layers: degree d collects x-parts of degree d and xi-parts of degree d - 1."""
        layers: dict[int, tuple[list, list]] = {}
        zero = SuperFunction.zero(self.variables, self.m)

        def layer(d):
            if d not in layers:
                layers[d] = ([zero] * self.n, [zero] * self.m)
            return layers[d]

        for i, comp in enumerate(self.x_components):
            for d, part in comp.degree_parts().items():
                layer(d)[0][i] = part
        for k, comp in enumerate(self.xi_components):
            for d, part in comp.degree_parts().items():
                layer(d + 1)[1][k] = part
        return {
            d: GradedVectorField(self.variables, self.m, xs, xis)
            for d, (xs, xis) in sorted(layers.items())
        }

    def is_homogeneous(self) -> bool:
        return len(self.degree_parts()) <= 1

    @property
    def degree(self) -> Optional[int]:
        parts = self.degree_parts()
        if not parts:
            return None
        if len(parts) > 1:
            raise StructuralError(f"vector field is not homogeneous (degrees {sorted(parts)})")
        return next(iter(parts))

    def __str__(self) -> str:
        pieces = []
        for i, c in enumerate(self.x_components):
            if c:
                pieces.append(f"[{c}]*d/d{self.variables[i]}")
        for k, c in enumerate(self.xi_components):
            if c:
                pieces.append(f"[{c}]*d/dxi{k + 1}")
        return " + ".join(pieces) if pieces else "0"

    def __repr__(self) -> str:
        return f"GradedVectorField({str(self)!r})"


def _left(f, g: SuperFunction) -> SuperFunction:
    if isinstance(f, SuperFunction):
        return f * g
    return g._coerce(f) * g


def apply(V: GradedVectorField, f: SuperFunction) -> SuperFunction:
    return V.apply(f)


def interior_product(s: Section) -> GradedVectorField:
    """Q = iota_s: the degree +1 field with xi^k -> s^k and x^i -> 0."""
    m = s.m
    zero = SuperFunction.zero(s.variables, m)
    return GradedVectorField(
        s.variables, m, [zero] * s.n, [SuperFunction.from_poly(p, m) for p in s.components]
    )


def bracket(X: GradedVectorField, Y: GradedVectorField) -> GradedVectorField:
    """Graded commutator [X, Y] = X o Y - (-1)^{|X||Y|} Y o X, layer by layer."""
    X._check(Y)
    result = GradedVectorField.zero(X.variables, X.m)
    for dx, Xd in X.degree_parts().items():
        for dy, Yd in Y.degree_parts().items():
            odd = (dx * dy) % 2 == 1
            xs = []
            for a, b in zip(Xd.x_components, Yd.x_components):
                term = Xd.apply(b)
                xs.append(term + Yd.apply(a) if odd else term - Yd.apply(a))
            xis = []
            for a, b in zip(Xd.xi_components, Yd.xi_components):
                term = Xd.apply(b)
                xis.append(term + Yd.apply(a) if odd else term - Yd.apply(a))
            result = result + GradedVectorField(X.variables, X.m, xs, xis)
    return result


def basis_fields(n: int, m: int) -> list[BasisField]:
    return [("x", i) for i in range(n)] + [("xi", k) for k in range(m)]


def basis_degree(which: BasisField) -> int:
    return 0 if which[0] == "x" else 1


def basis_coefficients(V: GradedVectorField) -> dict[BasisField, SuperFunction]:
    """Left coefficients of V along d/dx^i and d/dxi^k."""
    coeffs: dict[BasisField, SuperFunction] = {}
    for i, c in enumerate(V.x_components):
        if c:
            coeffs[("x", i)] = c
    for k, c in enumerate(V.xi_components):
        if c:
            coeffs[("xi", k)] = c
    return coeffs


@dataclass(frozen=True)
class TensorField:
    """A (1,2)-tensor of homogeneous degree, stored on pairs of coordinate basis fields."""

    variables: tuple[str, ...]
    m: int
    degree: int
    values: Mapping[tuple[BasisField, BasisField], GradedVectorField] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(
            self, "values", MappingProxyType({k: v for k, v in dict(self.values).items() if v})
        )

    @classmethod
    def zero(cls, variables: Sequence[str], m: int, degree: int = 0) -> "TensorField":
        return cls(tuple(variables), m, degree, {})

    def value(self, a: BasisField, b: BasisField) -> GradedVectorField:
        found = self.values.get((a, b))
        return found if found is not None else GradedVectorField.zero(self.variables, self.m)

    def evaluate(self, X: GradedVectorField, Y: GradedVectorField) -> GradedVectorField:
        """F(X, Y) extended with F(aX, bY) = (-1)^{|a|k + |b|(k + |X|)} a b F(X, Y)."""
        k = self.degree
        result = GradedVectorField.zero(self.variables, self.m)
        for alpha, a in basis_coefficients(X).items():
            for da, a_part in a.degree_parts().items():
                for beta, b in basis_coefficients(Y).items():
                    base = self.value(alpha, beta)
                    if not base:
                        continue
                    for db, b_part in b.degree_parts().items():
                        exponent = da * k + db * (k + basis_degree(alpha))
                        coeff = a_part * b_part
                        if exponent % 2:
                            coeff = -coeff
                        result = result + base.scale(coeff)
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorField):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.m == other.m
            and dict(self.values) == dict(other.values)
            and (self.degree == other.degree or not self.values)
        )

    def __hash__(self) -> int:
        return hash((self.variables, self.m, frozenset(self.values.items())))


def lie_derivative_tensor(Q: GradedVectorField, F: TensorField) -> TensorField:
    """(Q_E F)(X, Y) = [Q, F(X,Y)] - (-1)^k F([Q,X], Y) - (-1)^{k+|X|} F(X, [Q,Y]) on basis pairs."""
    if Q.variables != F.variables or Q.m != F.m:
        raise StructuralError("homological field and tensor live on different graded manifolds")
    k = F.degree
    basis = basis_fields(len(F.variables), F.m)
    lifted = {b: GradedVectorField.basis(F.variables, F.m, b) for b in basis}
    moved = {b: bracket(Q, lifted[b]) for b in basis}
    values = {}
    for alpha in basis:
        for beta in basis:
            value = bracket(Q, F.value(alpha, beta))
            first = F.evaluate(moved[alpha], lifted[beta])
            second = F.evaluate(lifted[alpha], moved[beta])
            value = value + first if k % 2 else value - first
            value = value + second if (k + basis_degree(alpha)) % 2 else value - second
            if value:
                values[(alpha, beta)] = value
    return TensorField(F.variables, F.m, k + 1, values)
