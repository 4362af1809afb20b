from __future__ import annotations

import random
from dataclasses import replace
from pathlib import Path

import pytest

from dg_atiyah.atiyah import Amp1Problem, NonVanishing, Vanishes, decide
from dg_atiyah.clean import Clean, DeclaredSingular, NotClean, RankEquationFailure
from dg_atiyah.derived import (
    DerivedProblem,
    Intersection,
    IntersectionWitness,
    SubmanifoldParam,
    build_amp1,
    kernel_bound_check,
    tangent_clean_check,
    tangent_dimension,
    zero_locus_iso_check,
)
from dg_atiyah.errors import MissingWitnessError, StructuralError, ValidationError
from dg_atiyah.problem import load_problem
from dg_atiyah.ring import Poly
from dg_atiyah.utils.expression_parser import parse_poly


def submanifold(params, *components, ambient=None) -> SubmanifoldParam:
    params = tuple(params)
    return SubmanifoldParam(
        ambient or len(components), params, tuple(parse_poly(c, params) for c in components)
    )


def parabola_line(claimed_dim=0, manifold=True) -> DerivedProblem:
    """y = x^2 against the x-axis: tangent at the origin."""
    return DerivedProblem(
        submanifold(("t",), "t", "t^2"),
        submanifold(("u",), "u", "0"),
        (Intersection((0,), (0,), IntersectionWitness(claimed_dim, manifold)),),
    )


def transverse_axes() -> DerivedProblem:
    return DerivedProblem(
        submanifold(("t",), "t", "0"),
        submanifold(("u",), "0", "u"),
        (Intersection((0,), (0,), IntersectionWitness(0)),),
    )


def test_build_amp1_subtracts_the_parametrizations() -> None:
    amp1 = build_amp1(parabola_line())
    assert amp1.variables == ("t", "u")
    assert [str(c) for c in amp1.section.components] == ["-t + u", "-t^2"]
    assert amp1.zero_points == ((0, 0),)


def test_tangent_intersection_is_not_clean_and_the_class_survives() -> None:
    dp = parabola_line()
    assert tangent_dimension(dp, dp.intersections[0]) == (1, 1)
    verdict = tangent_clean_check(dp)
    assert isinstance(verdict, NotClean)
    assert verdict.reason == RankEquationFailure(0, 1, 2)
    decision = decide(build_amp1(dp))
    assert isinstance(decision, NonVanishing)
    assert decision.jet_order == 0


def test_transverse_intersection_is_clean_and_the_class_vanishes() -> None:
    dp = transverse_axes()
    assert tangent_dimension(dp, dp.intersections[0]) == (0, 2)
    assert tangent_clean_check(dp) == Clean()
    assert isinstance(decide(build_amp1(dp)), Vanishes)


def test_identical_lines_are_clean_with_excess_dimension() -> None:
    dp = DerivedProblem(
        submanifold(("t",), "t", "0"),
        submanifold(("u",), "u", "0"),
        (Intersection((2,), (2,), IntersectionWitness(1)),),
    )
    assert tangent_clean_check(dp) == Clean()
    assert kernel_bound_check(dp) == []
    assert isinstance(decide(build_amp1(dp)), Vanishes)


def test_declared_non_manifold_intersection() -> None:
    verdict = tangent_clean_check(parabola_line(claimed_dim=1, manifold=False))
    assert isinstance(verdict, NotClean)
    assert verdict.reason == DeclaredSingular((1,))


def test_missing_claims_raise() -> None:
    dp = DerivedProblem(
        submanifold(("t",), "t", "0"),
        submanifold(("u",), "0", "u"),
        (Intersection((0,), (0,)),),
    )
    with pytest.raises(MissingWitnessError):
        tangent_clean_check(dp)


@pytest.mark.parametrize(
    "dp, message",
    [
        (
            DerivedProblem(submanifold(("t",), "t", "0"), submanifold(("t",), "0", "t")),
            "share parameter names",
        ),
        (
            DerivedProblem(submanifold(("t",), "t", "0"), submanifold(("u",), "u", "0", "0")),
            "lives in R",
        ),
        (
            DerivedProblem(
                submanifold(("t",), "t", "0"),
                submanifold(("u",), "0", "u"),
                (Intersection((1,), (0,)),),
            ),
            "X gives",
        ),
        (
            DerivedProblem(
                submanifold(("t",), "t^2", "0"),
                submanifold(("u",), "0", "u"),
                (Intersection((0,), (0,)),),
            ),
            "not an immersion",
        ),
    ],
)
def test_invalid_derived_problems(dp, message) -> None:
    with pytest.raises(ValidationError, match=message):
        build_amp1(dp)


def test_map_must_match_the_ambient_dimension() -> None:
    with pytest.raises(StructuralError):
        submanifold(("t",), "t", "0", ambient=3)


def test_iso_check_reports_extra_and_missing_points() -> None:
    dp = transverse_axes()
    amp1 = build_amp1(dp)
    assert zero_locus_iso_check(dp, amp1).consistent

    stray = Amp1Problem(amp1.section, None, ((0, 0), (1, 1)))
    report = zero_locus_iso_check(dp, stray)
    assert not report.consistent
    assert report.mismatches == ["points[1] does not come from a declared intersection"]

    empty = Amp1Problem(amp1.section, None, ())
    assert zero_locus_iso_check(dp, empty).mismatches == ["intersections[0] has no matching zero point"]


def test_point_and_line_in_space() -> None:
    dp = DerivedProblem(
        submanifold(("t",), "t", "t", "t"),
        submanifold(("u", "v"), "u", "v", "0"),
        (Intersection((0,), (0, 0), IntersectionWitness(0)),),
    )
    assert tangent_dimension(dp, dp.intersections[0]) == (0, 3)
    assert tangent_clean_check(dp) == Clean()
    assert kernel_bound_check(dp) == []


def permute_params(sub: SubmanifoldParam, order: tuple[int, ...]) -> SubmanifoldParam:
    names = tuple(sub.param_vars[i] for i in order)
    embed = [Poly.variable(names, name) for name in sub.param_vars]
    return SubmanifoldParam(sub.ambient_dim, names, tuple(p.compose(embed, names) for p in sub.map))


def relabel(dp: DerivedProblem, x_order=None, y_order=None) -> DerivedProblem:
    x_order = x_order or tuple(range(dp.X.dim))
    y_order = y_order or tuple(range(dp.Y.dim))
    intersections = tuple(
        Intersection(
            tuple(inter.x_params[i] for i in x_order),
            tuple(inter.y_params[i] for i in y_order),
            inter.witness,
        )
        for inter in dp.intersections
    )
    return replace(
        dp,
        X=permute_params(dp.X, x_order),
        Y=permute_params(dp.Y, y_order),
        intersections=intersections,
    )


def assert_relabeling_invariant(dp: DerivedProblem, relabeled: DerivedProblem, point_order) -> None:
    amp1, moved = build_amp1(dp), build_amp1(relabeled)
    assert moved.zero_points == tuple(tuple(p[i] for i in point_order) for p in amp1.zero_points)
    assert zero_locus_iso_check(relabeled, moved).mismatches == zero_locus_iso_check(dp, amp1).mismatches
    assert type(tangent_clean_check(relabeled)) is type(tangent_clean_check(dp))

    before, after = decide(amp1), decide(moved)
    assert type(before) is type(after)
    if isinstance(before, NonVanishing):
        assert after.witness_point == tuple(before.witness_point[i] for i in point_order)
        assert after.jet_order == before.jet_order


def test_swapping_the_parameters_of_x_keeps_the_verdict(corpus_dir: Path) -> None:
    dp = load_problem(corpus_dir / "derived" / "paraboloid_line.yaml").derived
    assert_relabeling_invariant(dp, relabel(dp, x_order=(1, 0)), (1, 0, 2))


def test_swapping_the_parameters_of_y_keeps_the_verdict(corpus_dir: Path) -> None:
    dp = load_problem(corpus_dir / "derived" / "line_plane.yaml").derived
    assert_relabeling_invariant(dp, relabel(dp, y_order=(1, 0)), (0, 2, 1))


def test_relabeling_a_random_tangent_surface(rng: random.Random) -> None:
    a = rng.choice([-3, -2, -1, 1, 2, 3])
    b, c = rng.randint(-3, 3), rng.randint(-3, 3)
    dp = DerivedProblem(
        submanifold(("t1", "t2"), "t1", "t2", f"{a}*t1^2 + ({b})*t1*t2 + ({c})*t2^2"),
        submanifold(("u",), "u", "0", "0"),
        (Intersection((0, 0), (0,), IntersectionWitness(0)),),
    )
    assert isinstance(tangent_clean_check(dp), NotClean)
    assert_relabeling_invariant(dp, relabel(dp, x_order=(1, 0)), (1, 0, 2))
