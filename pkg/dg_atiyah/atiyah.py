"""Atiyah cocycle, the coboundary matrices d1/d2/d3 and the vanishing decision.

Row labels are ``(k, i, j)`` with ``i <= j``: the basis element
dx^i (.) dx^j (x) e_k. Column labels:

    d1  (l, k, i, j)   xi^l dx^i (.) dx^j (x) e_k
    d2  (a, c, b)      dxi^a (x) dx^b (x) e_c
    d3  (i, j, c)      dx^i (.) dx^j (x) d_c

All orders are lexicographic on these tuples, which reproduces the printed
matrices for n = m = 2. Indices are 0-based; labels print 1-based.

The cocycle stores tensor values At(d_i, d_j). Membership pairs the
matrices with ``Cocycle.coefficients()``, the (.)-basis coefficients, whose
diagonal entries are half the tensor values.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Union

from .connection import (
    ConnectionTriple,
    LiftedFrame,
    covariant_derivative_section,
    validate,
)
from .errors import InternalError, InvalidConnectionError, StructuralError, ValidationError
from .graded import (
    GradedVectorField,
    Section,
    SuperFunction,
    TensorField,
    bracket,
    interior_product,
)
from .ring import Poly, as_rational, monomials_up_to
from .utils import linalg

logger = logging.getLogger(__name__)

RowLabel = tuple[int, int, int]
ColumnKey = tuple[str, tuple[int, ...]]  # (matrix kind, column label)
Certificate = Mapping[ColumnKey, Poly]

DEFAULT_JET_ORDER = 4


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i, n)]


def row_labels(n: int, m: int) -> list[RowLabel]:
    return [(k, i, j) for k in range(m) for (i, j) in _pairs(n)]


def format_row(row: RowLabel) -> str:
    k, i, j = row
    return f"dx{i + 1}.dx{j + 1}|e{k + 1}"


def format_column(kind: str, col: tuple[int, ...]) -> str:
    if kind == "d1":
        l, k, i, j = col
        return f"xi{l + 1}*dx{i + 1}.dx{j + 1}|e{k + 1}"
    if kind == "d2":
        a, c, b = col
        return f"dxi{a + 1}*dx{b + 1}|e{c + 1}"
    if kind == "d3":
        i, j, c = col
        return f"dx{i + 1}.dx{j + 1}|d{c + 1}"
    raise StructuralError(f"unknown operator kind {kind!r}")


# -- data types -------------------------------------------------------------


@dataclass(frozen=True)
class Cocycle:
    variables: tuple[str, ...]
    m: int
    entries: Mapping[tuple[int, int, int], Poly]  # (i, j, k), i <= j; tensor values

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        cleaned = {}
        for (i, j, k), value in dict(self.entries).items():
            if i > j:
                raise StructuralError(f"cocycle entry ({i}, {j}, {k}) must have i <= j")
            if value:
                cleaned[(i, j, k)] = value
        object.__setattr__(self, "entries", MappingProxyType(cleaned))

    @property
    def n(self) -> int:
        return len(self.variables)

    def entry(self, i: int, j: int, k: int) -> Poly:
        i, j = min(i, j), max(i, j)
        return self.entries.get((i, j, k)) or Poly.zero(self.variables)

    def rows(self) -> list[tuple[RowLabel, Poly]]:
        return [((k, i, j), self.entry(i, j, k)) for (k, i, j) in row_labels(self.n, self.m)]

    def coefficients(self) -> dict[RowLabel, Poly]:
        """(.)-basis coefficients: off-diagonal entries as stored, diagonal entries halved."""
        result = {}
        for (k, i, j), value in self.rows():
            if value:
                result[(k, i, j)] = value * Fraction(1, 2) if i == j else value
        return result

    def is_zero(self) -> bool:
        return not self.entries

    def degree(self) -> int:
        return max((p.total_degree for p in self.entries.values()), default=-1)

    def __sub__(self, other: "Cocycle") -> "Cocycle":
        if other.variables != self.variables or other.m != self.m:
            raise StructuralError("cocycles live on different problems")
        keys = set(self.entries) | set(other.entries)
        return Cocycle(
            self.variables, self.m, {key: self.entry(*key) - other.entry(*key) for key in keys}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cocycle):
            return NotImplemented
        return (self.variables, self.m, dict(self.entries)) == (
            other.variables,
            other.m,
            dict(other.entries),
        )

    def __hash__(self) -> int:
        return hash((self.variables, self.m, frozenset(self.entries.items())))


@dataclass(frozen=True)
class OperatorMatrix:
    kind: str
    variables: tuple[str, ...]
    m: int
    rows: tuple[RowLabel, ...]
    columns: tuple[tuple[int, ...], ...]
    entries: Mapping[tuple[RowLabel, tuple[int, ...]], Poly]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.columns)

    def entry(self, row: RowLabel, col: tuple[int, ...]) -> Poly:
        return self.entries.get((row, col)) or Poly.zero(self.variables)

    def column_entries(self) -> dict[tuple[int, ...], list[tuple[RowLabel, Poly]]]:
        by_column: dict[tuple[int, ...], list[tuple[RowLabel, Poly]]] = {c: [] for c in self.columns}
        for (row, col), value in self.entries.items():
            by_column[col].append((row, value))
        return by_column

    def grid(self) -> list[list[Poly]]:
        return [[self.entry(r, c) for c in self.columns] for r in self.rows]

    def apply(self, coefficients: Mapping[tuple[int, ...], Poly]) -> dict[RowLabel, Poly]:
        result: dict[RowLabel, Poly] = {}
        for (row, col), value in self.entries.items():
            coeff = coefficients.get(col)
            if coeff:
                result[row] = result.get(row, Poly.zero(self.variables)) + value * coeff
        return {r: v for r, v in result.items() if v}

    def is_zero(self) -> bool:
        return not self.entries


@dataclass(frozen=True)
class Operators:
    d1: OperatorMatrix
    d2: OperatorMatrix
    d3: OperatorMatrix

    def __iter__(self):
        return iter((self.d1, self.d2, self.d3))

    def by_kind(self, kind: str) -> OperatorMatrix:
        return {"d1": self.d1, "d2": self.d2, "d3": self.d3}[kind]


class VerdictKind(str, Enum):
    VANISHES = "Vanishes"
    NON_VANISHING = "NonVanishing"
    UNKNOWN = "Unknown"


VERDICT_EXIT_CODES = {
    VerdictKind.VANISHES: 0,
    VerdictKind.NON_VANISHING: 1,
    VerdictKind.UNKNOWN: 2,
}


@dataclass(frozen=True)
class Vanishes:
    certificate: Certificate
    degree: int
    kind = VerdictKind.VANISHES


@dataclass(frozen=True)
class NonVanishing:
    witness_point: tuple[Fraction, ...]
    jet_order: int
    kind = VerdictKind.NON_VANISHING


@dataclass(frozen=True)
class Unknown:
    degree_bound_tried: int
    jet_order_tried: int
    kind = VerdictKind.UNKNOWN


Verdict = Union[Vanishes, NonVanishing, Unknown]


class JetResult(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Amp1Problem:
    section: Section
    connection: Optional[ConnectionTriple] = None
    zero_points: tuple[tuple[Fraction, ...], ...] = ()
    degree_bound: Optional[int] = None
    jet_order: int = DEFAULT_JET_ORDER

    def __post_init__(self):
        if self.connection is None:
            object.__setattr__(
                self, "connection", ConnectionTriple.trivial(self.section.variables, self.section.m)
            )
        elif (self.connection.variables, self.connection.m) != (self.section.variables, self.section.m):
            raise StructuralError("connection and section live on different bundles")
        points = tuple(tuple(as_rational(v) for v in p) for p in self.zero_points)
        for p in points:
            if len(p) != self.n:
                raise StructuralError(f"zero point {p} has length {len(p)}, expected {self.n}")
        object.__setattr__(self, "zero_points", points)
        if self.degree_bound is not None and self.degree_bound < 0:
            raise StructuralError("degree_bound must be >= 0")
        if self.jet_order < 0:
            raise StructuralError("jet_order must be >= 0")

    @property
    def variables(self) -> tuple[str, ...]:
        return self.section.variables

    @property
    def n(self) -> int:
        return self.section.n

    @property
    def m(self) -> int:
        return self.section.m

    @property
    def effective_degree_bound(self) -> int:
        if self.degree_bound is not None:
            return self.degree_bound
        return default_degree_bound(self.section)

    def validate_points(self):
        for index, point in enumerate(self.zero_points):
            values = self.section.evaluate(point)
            if any(values):
                shown = ", ".join(str(v) for v in point)
                raise ValidationError(
                    f"points[{index}] = ({shown}) is not a zero of the section: s = "
                    f"({', '.join(str(v) for v in values)})"
                )


def default_degree_bound(section: Section) -> int:
    return 2 * max(section.max_degree(), 0) + 2


def _require_valid(problem: Amp1Problem):
    violations = validate(problem.connection)
    if violations:
        raise InvalidConnectionError(violations)


# -- cocycle routes -----------------------------------------------------------


def cocycle_closed_form(problem: Amp1Problem) -> Cocycle:
    """nabla^E_i nabla^E_j s - sum_c Gamma^M[i][j][c] nabla^E_c s + beta(i, j) s, averaged over (i, j)."""
    _require_valid(problem)
    triple, s = problem.connection, problem.section
    n, m = problem.n, problem.m
    first = [covariant_derivative_section(triple, c, s) for c in range(n)]
    half = Fraction(1, 2)

    def raw(i: int, j: int, k: int) -> Poly:
        value = covariant_derivative_section(triple, i, first[j]).components[k]
        for c in range(n):
            coeff = triple.christoffel(i, j, c)
            if coeff:
                value = value - coeff * first[c].components[k]
        for a in range(m):
            coeff = triple.beta_entry(i, j, a, k)
            if coeff:
                value = value + coeff * s.components[a]
        return value

    entries = {}
    for i, j in _pairs(n):
        for k in range(m):
            entries[(i, j, k)] = raw(i, j, k) if i == j else (raw(i, j, k) + raw(j, i, k)) * half
    return Cocycle(problem.variables, m, entries)


def atiyah_value(
    frame: LiftedFrame, Q: GradedVectorField, X: GradedVectorField, Y: GradedVectorField
) -> GradedVectorField:
    """At(X, Y) = [Q, nabla_X Y] - nabla_{[Q,X]} Y - (-1)^{|X|} nabla_X [Q, Y] for homogeneous X."""
    value = bracket(Q, frame.nabla(X, Y)) - frame.nabla(bracket(Q, X), Y)
    last = frame.nabla(X, bracket(Q, Y))
    return value + last if (X.degree or 0) % 2 else value - last


def cocycle_definitional(problem: Amp1Problem) -> Cocycle:
    _require_valid(problem)
    frame = LiftedFrame(problem.connection)
    Q = interior_product(problem.section)
    n, m = problem.n, problem.m

    # the iota directions must pair to zero
    for a in range(m):
        iota = frame.iotas[a]
        others = list(frame.lifts) + list(frame.iotas)
        for other in others:
            if atiyah_value(frame, Q, iota, other) or atiyah_value(frame, Q, other, iota):
                raise InternalError(f"At(iota_{a + 1}, .) does not vanish")

    entries = {}
    for i, j in _pairs(n):
        value = atiyah_value(frame, Q, frame.lifts[i], frame.lifts[j])
        if not value:
            continue
        layers = value.degree_parts()
        if set(layers) != {1} or any(value.x_components):
            raise InternalError(
                f"At(X{i + 1}, X{j + 1}) has components outside degree +1: degrees {sorted(layers)}"
            )
        for k in range(m):
            comp = value.xi_components[k]
            if set(comp.terms) - {()}:
                raise InternalError(f"At(X{i + 1}, X{j + 1}) is not the interior product of a section")
            entries[(i, j, k)] = comp.body()
    logger.debug("definitional cocycle: %d nonzero entries", len(entries))
    return Cocycle(problem.variables, m, entries)


# -- coboundary matrices --------------------------------------------------------


def _matrix(problem: Amp1Problem, kind: str, columns: list, entries: dict) -> OperatorMatrix:
    cleaned = {key: value for key, value in entries.items() if value}
    return OperatorMatrix(
        kind,
        problem.variables,
        problem.m,
        tuple(row_labels(problem.n, problem.m)),
        tuple(columns),
        MappingProxyType(cleaned),
    )


def build_d1(problem: Amp1Problem) -> OperatorMatrix:
    n, m, s = problem.n, problem.m, problem.section
    rows = row_labels(n, m)
    columns = [(l,) + row for l in range(m) for row in rows]
    entries = {(col[1:], col): s.components[col[0]] for col in columns}
    return _matrix(problem, "d1", columns, entries)


def build_d2(problem: Amp1Problem) -> OperatorMatrix:
    n, m, s = problem.n, problem.m, problem.section
    columns = [(a, c, b) for a in range(m) for c in range(m) for b in range(n)]
    entries: dict = {}
    for a, c, b in columns:
        for p in range(n):
            derivative = s.components[a].partial(p)
            if not derivative:
                continue
            key = ((c, min(p, b), max(p, b)), (a, c, b))
            entries[key] = entries[key] + derivative if key in entries else derivative
    return _matrix(problem, "d2", columns, entries)


def build_d3(problem: Amp1Problem) -> OperatorMatrix:
    n, m, s = problem.n, problem.m, problem.section
    columns = [(i, j, c) for (i, j) in _pairs(n) for c in range(n)]
    entries = {}
    for i, j, c in columns:
        for p in range(m):
            entries[((p, i, j), (i, j, c))] = s.components[p].partial(c)
    return _matrix(problem, "d3", columns, entries)


def build_operators(problem: Amp1Problem) -> Operators:
    return Operators(build_d1(problem), build_d2(problem), build_d3(problem))


def unit_rows(matrix: OperatorMatrix) -> list[RowLabel]:
    """Rows hit by a column whose only entry is a nonzero constant."""
    found = set()
    for col, items in matrix.column_entries().items():
        if len(items) == 1 and items[0][1].is_constant():
            found.add(items[0][0])
    return [r for r in matrix.rows if r in found]


# -- linear systems ------------------------------------------------------------


def _membership(
    operators: Operators,
    target: Mapping[RowLabel, Poly],
    n: int,
    degree: int,
    point: Optional[Sequence[Fraction]] = None,
) -> Optional[dict[ColumnKey, dict]]:
    """Solve sum_c M[r][c] f_c = target[r] with deg f_c <= degree.

    With ``point`` the system is taken in coordinates centred there and every
    product is truncated above ``degree`` (jets of order ``degree``).
    """
    truncate = point is not None
    unknown_monomials = monomials_up_to(n, degree)
    unknowns: list[tuple[ColumnKey, tuple[int, ...]]] = []
    equations: dict[tuple[RowLabel, tuple[int, ...]], dict[int, Fraction]] = {}

    def equation(row, exponent):
        key = (row, exponent)
        if key not in equations:
            equations[key] = {}
        return equations[key]

    for matrix in operators:
        for col, items in matrix.column_entries().items():
            if truncate:
                items = [(row, value.shift(point)) for row, value in items]
            for alpha in unknown_monomials:
                index = len(unknowns)
                unknowns.append(((matrix.kind, col), alpha))
                for row, value in items:
                    for beta, coeff in value.terms.items():
                        gamma = tuple(x + y for x, y in zip(alpha, beta))
                        if truncate and sum(gamma) > degree:
                            continue
                        eq = equation(row, gamma)
                        eq[index] = eq.get(index, Fraction(0)) + coeff

    rhs_terms: dict[tuple[RowLabel, tuple[int, ...]], Fraction] = {}
    for row, value in target.items():
        if truncate:
            value = value.shift(point).truncate(degree)
        for gamma, coeff in value.terms.items():
            rhs_terms[(row, gamma)] = coeff
            equation(row, gamma)

    keys = sorted(equations)
    rows = [equations[k] for k in keys]
    rhs = [rhs_terms.get(k, Fraction(0)) for k in keys]
    logger.debug(
        "membership system: %d equations, %d unknowns, degree %d%s",
        len(rows),
        len(unknowns),
        degree,
        " (jet)" if truncate else "",
    )
    solution = linalg.solve(rows, rhs, len(unknowns))
    if solution is None:
        return None
    grouped: dict[ColumnKey, dict] = {}
    for (column, alpha), value in zip(unknowns, solution):
        if value:
            grouped.setdefault(column, {})[alpha] = value
    return grouped


def certificate_search(
    problem: Amp1Problem, cocycle: Cocycle, operators: Operators, degree_bound: int
) -> Optional[dict[ColumnKey, Poly]]:
    """Coefficient polynomials of degree <= degree_bound with (d1+d2+d3)(f) = cocycle, if any."""
    if degree_bound < 0:
        raise StructuralError("degree bound must be >= 0")
    target = cocycle.coefficients()
    if not target:
        return {}
    grouped = _membership(operators, target, problem.n, degree_bound)
    if grouped is None:
        return None
    return {column: Poly(problem.variables, terms) for column, terms in grouped.items()}


def jet_obstruction(
    problem: Amp1Problem,
    cocycle: Cocycle,
    operators: Operators,
    point: Sequence[Fraction],
    order: int,
) -> JetResult:
    if order < 0:
        raise StructuralError("jet order must be >= 0")
    point = tuple(as_rational(v) for v in point)
    if len(point) != problem.n:
        raise StructuralError(f"point has length {len(point)}, expected {problem.n}")
    target = cocycle.coefficients()
    if not target:
        return JetResult.FEASIBLE
    grouped = _membership(operators, target, problem.n, order, point=point)
    return JetResult.FEASIBLE if grouped is not None else JetResult.INFEASIBLE


def replay_certificate(cocycle: Cocycle, operators: Operators, certificate: Certificate) -> bool:
    total: dict[RowLabel, Poly] = {}
    zero = Poly.zero(cocycle.variables)
    for matrix in operators:
        coefficients = {col: value for (kind, col), value in certificate.items() if kind == matrix.kind}
        for row, value in matrix.apply(coefficients).items():
            total[row] = total.get(row, zero) + value
    total = {row: value for row, value in total.items() if value}
    return total == cocycle.coefficients()


def dual_section_certificate(problem: Amp1Problem, cocycle: Cocycle) -> Optional[dict[ColumnKey, Poly]]:
    """If some s^l is a nonzero constant c, the d1 columns with that l clear every row."""
    for l, component in enumerate(problem.section.components):
        if component and component.is_constant():
            c = component.constant_term()
            return {
                ("d1", (l,) + row): value * (1 / c)
                for row, value in cocycle.coefficients().items()
            }
    return None


def _certificate_degree(certificate: Certificate) -> int:
    return max((p.total_degree for p in certificate.values()), default=0)


def decide(problem: Amp1Problem, workers: int = 1) -> Verdict:
    problem.validate_points()
    cocycle = cocycle_closed_form(problem)
    operators = build_operators(problem)

    def first_obstruction(point) -> Optional[int]:
        for order in range(problem.jet_order + 1):
            if jet_obstruction(problem, cocycle, operators, point, order) is JetResult.INFEASIBLE:
                return order
        return None

    if not cocycle.is_zero() and problem.zero_points:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                orders = list(pool.map(first_obstruction, problem.zero_points))
        else:
            orders = []
            for point in problem.zero_points:
                orders.append(first_obstruction(point))
                if orders[-1] is not None:
                    break
        for point, order in zip(problem.zero_points, orders):
            if order is not None:
                logger.info("jet obstruction at %s, order %d", point, order)
                return NonVanishing(point, order)

    if cocycle.is_zero():
        return Vanishes(MappingProxyType({}), 0)

    shortcut = dual_section_certificate(problem, cocycle)
    if shortcut is not None:
        logger.info("nowhere-vanishing component gives a dual-section certificate")
        return Vanishes(MappingProxyType(shortcut), _certificate_degree(shortcut))

    bound = problem.effective_degree_bound
    for degree in range(bound + 1):
        certificate = certificate_search(problem, cocycle, operators, degree)
        if certificate is not None:
            logger.info("certificate found at degree %d", degree)
            return Vanishes(MappingProxyType(certificate), degree)
        logger.debug("no certificate at degree %d", degree)
    return Unknown(bound, problem.jet_order)


def replay_witness(problem: Amp1Problem, verdict: NonVanishing) -> bool:
    cocycle = cocycle_closed_form(problem)
    operators = build_operators(problem)
    result = jet_obstruction(problem, cocycle, operators, verdict.witness_point, verdict.jet_order)
    return result is JetResult.INFEASIBLE


# -- tensors in the coordinate frame --------------------------------------------


def tensor_from_coefficients(
    problem: Amp1Problem,
    d1: Mapping[tuple[int, ...], Poly] = None,
    d2: Mapping[tuple[int, ...], Poly] = None,
    d3: Mapping[tuple[int, ...], Poly] = None,
) -> TensorField:
    """Degree-0 tensor with the given column coefficients; dx^i (.) dx^i counts twice on the diagonal."""
    variables, m = problem.variables, problem.m
    values: dict = {}

    def add(a, b, field_value):
        key = (a, b)
        values[key] = values[key] + field_value if key in values else field_value

    def symmetric(i, j, field_value):
        if i == j:
            add(("x", i), ("x", i), field_value.scale(2))
        else:
            add(("x", i), ("x", j), field_value)
            add(("x", j), ("x", i), field_value)

    for (l, k, i, j), f in (d1 or {}).items():
        xi_l = SuperFunction.xi(variables, m, l) * f
        symmetric(i, j, GradedVectorField.fiber(variables, m, k).scale(xi_l))
    for (a, c, b), g in (d2 or {}).items():
        value = GradedVectorField.fiber(variables, m, c).scale(g)
        add(("xi", a), ("x", b), value)
        add(("x", b), ("xi", a), value)
    for (i, j, c), h in (d3 or {}).items():
        symmetric(i, j, GradedVectorField.coordinate(variables, m, c).scale(h))
    return TensorField(variables, m, 0, values)


def tensor_coefficients(tensor: TensorField) -> dict[RowLabel, Poly]:
    """Read a degree +1 tensor back as (.)-basis coefficients on the cocycle rows."""
    n = len(tensor.variables)
    result = {}
    for k, i, j in row_labels(n, tensor.m):
        value = tensor.value(("x", i), ("x", j))
        comp = value.xi_components[k].body()
        if comp:
            result[(k, i, j)] = comp * Fraction(1, 2) if i == j else comp
    return result


# -- coordinate and frame changes ------------------------------------------------


def change_coordinates(problem: Amp1Problem, A: Sequence[Sequence], P: Sequence[Sequence]) -> Amp1Problem:
    """s'(y) = P s(A y); zero points map by A^{-1}. Only the trivial connection is carried."""
    if not problem.connection.is_trivial():
        raise StructuralError("change_coordinates supports the trivial connection only")
    n, m = problem.n, problem.m
    A = [[as_rational(v) for v in row] for row in A]
    P = [[as_rational(v) for v in row] for row in P]
    if len(A) != n or any(len(r) != n for r in A) or len(P) != m or any(len(r) != m for r in P):
        raise StructuralError("change_coordinates needs an n x n and an m x m matrix")
    A_inv = linalg.inverse(A)
    linalg.inverse(P)
    variables = problem.variables
    ys = [Poly.variable(variables, j) for j in range(n)]
    maps = [sum((y * A[i][j] for j, y in enumerate(ys)), Poly.zero(variables)) for i in range(n)]
    pulled = [c.compose(maps, variables) for c in problem.section.components]
    components = [
        sum((pulled[l] * P[k][l] for l in range(m)), Poly.zero(variables)) for k in range(m)
    ]
    points = [tuple(linalg.mat_vec(A_inv, p)) for p in problem.zero_points]
    return Amp1Problem(
        Section(variables, tuple(components)),
        None,
        tuple(points),
        problem.degree_bound,
        problem.jet_order,
    )
