"""Amplitude +1 model of a derived intersection X ∩ Y in R^d.

In the flat chart the model has base R^k x R^l (parameters t of X, u of Y),
fiber R^d and section s(t, u) = map_Y(u) - map_X(t).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .atiyah import DEFAULT_JET_ORDER, Amp1Problem
from .clean import (
    Clean,
    CleanVerdict,
    DeclaredSingular,
    NotClean,
    RankEquationFailure,
    ds_rank,
)
from .errors import MissingWitnessError, StructuralError, ValidationError
from .graded import Section
from .ring import Poly, as_rational, jacobian
from .utils import linalg

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubmanifoldParam:
    ambient_dim: int
    param_vars: tuple[str, ...]
    map: tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "param_vars", tuple(self.param_vars))
        object.__setattr__(self, "map", tuple(self.map))
        if len(self.map) != self.ambient_dim:
            raise StructuralError(f"map has {len(self.map)} components, ambient_dim is {self.ambient_dim}")
        for p in self.map:
            if p.variables != self.param_vars:
                raise StructuralError(f"map component over {p.variables}, expected {self.param_vars}")

    @property
    def dim(self) -> int:
        return len(self.param_vars)

    def evaluate(self, params: Sequence) -> tuple[Fraction, ...]:
        return tuple(p.evaluate(params) for p in self.map)

    def tangent(self, params: Sequence) -> list[list[Fraction]]:
        """d x k Jacobian at ``params``; zero columns when k = 0."""
        if not self.param_vars:
            return [[] for _ in range(self.ambient_dim)]
        return jacobian(self.map, params)


@dataclass(frozen=True)
class IntersectionWitness:
    claimed_dim: int
    manifold: bool = True


@dataclass(frozen=True)
class Intersection:
    x_params: tuple[Fraction, ...]
    y_params: tuple[Fraction, ...]
    witness: Optional[IntersectionWitness] = None

    def __post_init__(self):
        object.__setattr__(self, "x_params", tuple(as_rational(v) for v in self.x_params))
        object.__setattr__(self, "y_params", tuple(as_rational(v) for v in self.y_params))

    @property
    def point(self) -> tuple[Fraction, ...]:
        return self.x_params + self.y_params


@dataclass(frozen=True)
class DerivedProblem:
    X: SubmanifoldParam
    Y: SubmanifoldParam
    intersections: tuple[Intersection, ...] = ()
    degree_bound: Optional[int] = None
    jet_order: int = DEFAULT_JET_ORDER

    def __post_init__(self):
        object.__setattr__(self, "intersections", tuple(self.intersections))

    @property
    def ambient_dim(self) -> int:
        return self.X.ambient_dim

    @property
    def variables(self) -> tuple[str, ...]:
        return self.X.param_vars + self.Y.param_vars

    def validate(self):
        if self.X.ambient_dim != self.Y.ambient_dim:
            raise ValidationError(
                f"X lives in R^{self.X.ambient_dim} but Y lives in R^{self.Y.ambient_dim}"
            )
        shared = set(self.X.param_vars) & set(self.Y.param_vars)
        if shared:
            raise ValidationError(f"X and Y share parameter names {sorted(shared)}")
        for index, inter in enumerate(self.intersections):
            if len(inter.x_params) != self.X.dim or len(inter.y_params) != self.Y.dim:
                raise ValidationError(f"intersections[{index}]: parameter lengths do not match X and Y")
            on_x, on_y = self.X.evaluate(inter.x_params), self.Y.evaluate(inter.y_params)
            if on_x != on_y:
                raise ValidationError(
                    f"intersections[{index}]: X gives ({', '.join(map(str, on_x))}) "
                    f"but Y gives ({', '.join(map(str, on_y))})"
                )
            rank_x = linalg.rank(self.X.tangent(inter.x_params)) if self.X.dim else 0
            rank_y = linalg.rank(self.Y.tangent(inter.y_params)) if self.Y.dim else 0
            if rank_x != self.X.dim or rank_y != self.Y.dim:
                raise ValidationError(f"intersections[{index}]: parametrization is not an immersion there")


def _embed(p: Poly, variables: tuple[str, ...]) -> Poly:
    maps = [Poly.variable(variables, name) for name in p.variables]
    return p.compose(maps, variables)


def build_amp1(dp: DerivedProblem) -> Amp1Problem:
    dp.validate()
    variables = dp.variables
    components = tuple(
        _embed(y, variables) - _embed(x, variables) for x, y in zip(dp.X.map, dp.Y.map)
    )
    return Amp1Problem(
        Section(variables, components),
        None,
        tuple(inter.point for inter in dp.intersections),
        dp.degree_bound,
        dp.jet_order,
    )


def tangent_dimension(dp: DerivedProblem, inter: Intersection) -> tuple[int, int]:
    """(dim T X ∩ T Y, rank [DX | DY]) at an intersection."""
    DX = dp.X.tangent(inter.x_params)
    DY = dp.Y.tangent(inter.y_params)
    stacked = [rx + ry for rx, ry in zip(DX, DY)]
    joint = linalg.rank(stacked) if dp.X.dim + dp.Y.dim else 0
    return dp.X.dim + dp.Y.dim - joint, joint


def tangent_clean_check(dp: DerivedProblem) -> CleanVerdict:
    dp.validate()
    n = dp.X.dim + dp.Y.dim
    for index, inter in enumerate(dp.intersections):
        if inter.witness is None:
            raise MissingWitnessError(f"intersections[{index}] has no claimed_dim")
    for inter in dp.intersections:
        witness = inter.witness
        if not witness.manifold:
            return NotClean(inter.point, DeclaredSingular((witness.claimed_dim,)))
        dim, joint = tangent_dimension(dp, inter)
        if witness.claimed_dim != dim:
            logger.info("tangent intersection has dim %d, X∩Y has dim %d", dim, witness.claimed_dim)
            return NotClean(inter.point, RankEquationFailure(witness.claimed_dim, joint, n))
    return Clean()


@dataclass
class IsoReport:
    mismatches: list[str] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.mismatches


def zero_locus_iso_check(dp: DerivedProblem, amp1: Amp1Problem) -> IsoReport:
    report = IsoReport()
    declared = {inter.point for inter in dp.intersections}
    zeros = set(amp1.zero_points)
    for index, inter in enumerate(dp.intersections):
        if inter.point not in zeros:
            report.mismatches.append(f"intersections[{index}] has no matching zero point")
        elif not amp1.section.vanishes_at(inter.point):
            report.mismatches.append(f"intersections[{index}] maps to a point where s does not vanish")
    k = dp.X.dim
    for index, point in enumerate(amp1.zero_points):
        if len(point) != len(dp.variables):
            report.mismatches.append(f"points[{index}] has the wrong length")
            continue
        if point not in declared:
            report.mismatches.append(f"points[{index}] does not come from a declared intersection")
            continue
        if dp.X.evaluate(point[:k]) != dp.Y.evaluate(point[k:]):
            report.mismatches.append(f"points[{index}] is not an intersection of X and Y")
    return report


def kernel_bound_check(dp: DerivedProblem) -> list[str]:
    """dim(T X ∩ T Y) = dim ker Ds at each zero of the built section; returns mismatches."""
    amp1 = build_amp1(dp)
    n = amp1.n
    mismatches = []
    for index, inter in enumerate(dp.intersections):
        dim, _ = tangent_dimension(dp, inter)
        kernel = n - ds_rank(amp1.section, inter.point)
        if dim != kernel:
            mismatches.append(f"intersections[{index}]: tangent dim {dim} != dim ker Ds {kernel}")
    return mismatches
