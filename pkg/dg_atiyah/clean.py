"""Clean-intersection oracle: dim T_p Z + rank Ds_p = n on witnessed charts of Z = s^{-1}(0).

The zero locus is never discovered here; charts come from the problem file
or from the derived-intersection builder and are validated before use.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import StructuralError, ValidationError, WitnessValidationError
from .graded import Section
from .ring import Poly, as_rational, jacobian
from .utils import linalg

logger = logging.getLogger(__name__)

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class Chart:
    base_point: Point
    param_vars: tuple[str, ...]
    param_map: tuple[Poly, ...]
    param_point: Point
    claimed_dim: int

    def __post_init__(self):
        object.__setattr__(self, "base_point", tuple(as_rational(v) for v in self.base_point))
        object.__setattr__(self, "param_point", tuple(as_rational(v) for v in self.param_point))
        object.__setattr__(self, "param_vars", tuple(self.param_vars))
        object.__setattr__(self, "param_map", tuple(self.param_map))


@dataclass(frozen=True)
class ZeroLocusWitness:
    points: tuple[Point, ...] = ()
    charts: tuple[Chart, ...] = ()

    def __post_init__(self):
        object.__setattr__(
            self, "points", tuple(tuple(as_rational(v) for v in p) for p in self.points)
        )
        object.__setattr__(self, "charts", tuple(self.charts))


@dataclass(frozen=True)
class WitnessFailure:
    location: str  # "points[0]" or "charts[1]"
    detail: str

    def __str__(self) -> str:
        return f"{self.location}: {self.detail}"


@dataclass(frozen=True)
class RankEquationFailure:
    dim_z: int
    rank_ds: int
    n: int

    def __str__(self) -> str:
        return f"dim T_pZ + rank Ds_p = {self.dim_z} + {self.rank_ds} != {self.n}"


@dataclass(frozen=True)
class DeclaredSingular:
    claimed_dims: tuple[int, ...]

    def __str__(self) -> str:
        return f"declared singular: charts through the point claim dimensions {list(self.claimed_dims)}"


class CleanKind(str, Enum):
    CLEAN = "Clean"
    NOT_CLEAN = "NotClean"
    UNKNOWN = "Unknown"


CLEAN_EXIT_CODES = {CleanKind.CLEAN: 0, CleanKind.NOT_CLEAN: 1, CleanKind.UNKNOWN: 2}


@dataclass(frozen=True)
class Clean:
    kind = CleanKind.CLEAN


@dataclass(frozen=True)
class NotClean:
    witness_point: Point
    reason: Union[RankEquationFailure, DeclaredSingular]
    kind = CleanKind.NOT_CLEAN


@dataclass(frozen=True)
class CleanUnknown:
    reason: str
    kind = CleanKind.UNKNOWN


CleanVerdict = Union[Clean, NotClean, CleanUnknown]


def ds_matrix(s: Section, p: Sequence) -> list[list[Fraction]]:
    """Jacobian of s at a zero p, m x n."""
    if len(p) != s.n:
        raise StructuralError(f"point has length {len(p)}, expected {s.n}")
    values = s.evaluate(p)
    if any(values):
        raise ValidationError(f"point {tuple(str(v) for v in p)} is not on the zero locus")
    return s.jacobian(p)


def ds_rank(s: Section, p: Sequence) -> int:
    return linalg.rank(ds_matrix(s, p))


def validate_witness(s: Section, witness: ZeroLocusWitness) -> list[WitnessFailure]:
    failures = []
    for index, point in enumerate(witness.points):
        if len(point) != s.n:
            failures.append(WitnessFailure(f"points[{index}]", f"length {len(point)}, expected {s.n}"))
        elif not s.vanishes_at(point):
            failures.append(WitnessFailure(f"points[{index}]", "section does not vanish there"))
    for index, chart in enumerate(witness.charts):
        failures.extend(_chart_failures(s, f"charts[{index}]", chart))
    return failures


def _chart_failures(s: Section, location: str, chart: Chart) -> list[WitnessFailure]:
    problems = []
    k = len(chart.param_vars)
    if len(chart.param_map) != s.n:
        return [WitnessFailure(location, f"param_map has {len(chart.param_map)} components, expected {s.n}")]
    if len(chart.base_point) != s.n:
        return [WitnessFailure(location, f"base_point has length {len(chart.base_point)}, expected {s.n}")]
    if len(chart.param_point) != k:
        return [WitnessFailure(location, f"param_point has length {len(chart.param_point)}, expected {k}")]
    if any(p.variables != chart.param_vars for p in chart.param_map):
        return [WitnessFailure(location, "param_map is not written in param_vars")]
    if chart.claimed_dim < 0:
        problems.append(WitnessFailure(location, "claimed_dim must be >= 0"))
    image = tuple(p.evaluate(chart.param_point) for p in chart.param_map)
    if image != chart.base_point:
        problems.append(
            WitnessFailure(
                location,
                f"param_map(param_point) = ({', '.join(str(v) for v in image)}) "
                f"!= base_point ({', '.join(str(v) for v in chart.base_point)})",
            )
        )
    for index, component in enumerate(s.components):
        pulled = component.compose(chart.param_map, chart.param_vars)
        if pulled:
            problems.append(
                WitnessFailure(location, f"s^{index + 1} o param_map = {pulled} is not identically zero")
            )
    rank = linalg.rank(jacobian(chart.param_map, chart.param_point)) if k else 0
    if rank != chart.claimed_dim:
        problems.append(
            WitnessFailure(location, f"param_map Jacobian has rank {rank}, claimed_dim is {chart.claimed_dim}")
        )
    return problems


def clean_check(s: Section, witness: ZeroLocusWitness, workers: int = 1) -> CleanVerdict:
    failures = validate_witness(s, witness)
    if failures:
        raise WitnessValidationError(failures)
    if not witness.charts:
        if witness.points:
            return CleanUnknown("zero points are declared but no chart covers them")
        return Clean()
    bases = {chart.base_point for chart in witness.charts}
    uncovered = [p for p in witness.points if p not in bases]
    if uncovered:
        return CleanUnknown(
            f"no chart through point ({', '.join(str(v) for v in uncovered[0])})"
        )

    def chart_rank(chart: Chart) -> int:
        return ds_rank(s, chart.base_point)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ranks = list(pool.map(chart_rank, witness.charts))
    else:
        ranks = [chart_rank(chart) for chart in witness.charts]

    seen: dict[Point, list[int]] = {}
    for chart, rank in zip(witness.charts, ranks):
        dims = seen.setdefault(chart.base_point, [])
        dims.append(chart.claimed_dim)
        if len(set(dims)) > 1:
            return NotClean(chart.base_point, DeclaredSingular(tuple(dims)))
        if chart.claimed_dim + rank != s.n:
            logger.info("rank equation fails at %s: %d + %d != %d", chart.base_point, chart.claimed_dim, rank, s.n)
            return NotClean(chart.base_point, RankEquationFailure(chart.claimed_dim, rank, s.n))
    return Clean()


def _linear_coefficients(s: Section) -> Optional[list[list[Fraction]]]:
    rows = []
    for component in s.components:
        if component.total_degree > 1 or component.constant_term():
            return None
        rows.append([component.coefficient(tuple(int(i == j) for j in range(s.n))) for i in range(s.n)])
    return rows


def linear_normal_form_detect(s: Section) -> Optional[int]:
    """r when s is (x^{i_1}, ..., x^{i_r}, 0, ...) up to a constant frame change and a variable permutation."""
    coefficients = _linear_coefficients(s)
    if coefficients is None:
        return None
    if not coefficients:
        return 0
    reduced, pivots = linalg.rref(coefficients)
    for row in reduced[: len(pivots)]:
        if sum(1 for v in row if v) != 1:
            return None
    return len(pivots)


def canonical_witness(s: Section) -> ZeroLocusWitness:
    """The kernel chart of a linear section through the origin."""
    coefficients = _linear_coefficients(s)
    if coefficients is None:
        raise StructuralError("canonical_witness needs a linear section without constant terms")
    basis = linalg.nullspace(coefficients, ncols=s.n)
    names = [f"t{i + 1}" for i in range(len(basis))]
    if set(names) & set(s.variables):
        names = [f"param{i + 1}" for i in range(len(basis))]
    params = [Poly.variable(names, i) for i in range(len(names))]
    zero = Poly.zero(names)
    param_map = tuple(
        sum((params[b] * basis[b][i] for b in range(len(basis))), zero) for i in range(s.n)
    )
    origin = (Fraction(0),) * s.n
    chart = Chart(origin, tuple(names), param_map, (Fraction(0),) * len(names), len(basis))
    return ZeroLocusWitness((origin,), (chart,))


def satisfies_adapted_form(s: Section, r: int, point: Sequence) -> bool:
    """s^k = x^k - p^k for k < r, and s^j, d s^j vanish at p for j >= r."""
    point = tuple(as_rational(v) for v in point)
    if not 0 <= r <= min(s.n, s.m):
        return False
    for k in range(r):
        if s.components[k] != Poly.variable(s.variables, k) - point[k]:
            return False
    for component in s.components[r:]:
        if component.evaluate(point) or any(component.partial(i).evaluate(point) for i in range(s.n)):
            return False
    return True


def transform_witness(witness: ZeroLocusWitness, A: Sequence[Sequence]) -> ZeroLocusWitness:
    """Image of a witness under x = A y (frame changes leave witnesses alone)."""
    A_inv = linalg.inverse([[as_rational(v) for v in row] for row in A])
    charts = []
    for chart in witness.charts:
        zero = Poly.zero(chart.param_vars)
        mapped = tuple(
            sum((chart.param_map[j] * A_inv[i][j] for j in range(len(chart.param_map))), zero)
            for i in range(len(A_inv))
        )
        charts.append(
            Chart(
                tuple(linalg.mat_vec(A_inv, chart.base_point)),
                chart.param_vars,
                mapped,
                chart.param_point,
                chart.claimed_dim,
            )
        )
    points = [tuple(linalg.mat_vec(A_inv, p)) for p in witness.points]
    return ZeroLocusWitness(tuple(points), tuple(charts))
