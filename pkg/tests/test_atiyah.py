from __future__ import annotations

import random
from fractions import Fraction

import pytest

from conftest import amp1, random_poly, random_section, variables
from dg_atiyah.atiyah import (
    VERDICT_EXIT_CODES,
    Amp1Problem,
    JetResult,
    NonVanishing,
    Unknown,
    Vanishes,
    build_d1,
    build_d2,
    build_d3,
    build_operators,
    certificate_search,
    change_coordinates,
    cocycle_closed_form,
    cocycle_definitional,
    decide,
    default_degree_bound,
    dual_section_certificate,
    format_column,
    format_row,
    jet_obstruction,
    replay_certificate,
    replay_witness,
    tensor_coefficients,
    tensor_from_coefficients,
    unit_rows,
)
from dg_atiyah.connection import ConnectionTriple
from dg_atiyah.errors import InvalidConnectionError, StructuralError, ValidationError
from dg_atiyah.graded import Section, interior_product, lie_derivative_tensor
from dg_atiyah.ring import Poly
from dg_atiyah.utils.expression_parser import parse_poly

XY = ("x1", "x2")
X = ("x",)


def golden_problem() -> Amp1Problem:
    return amp1(XY, "x1^2*x2 + 3*x2", "x1*x2^2 - x1")


def test_labels_print_one_based() -> None:
    assert format_row((1, 0, 1)) == "dx1.dx2|e2"
    assert format_column("d1", (0, 1, 0, 0)) == "xi1*dx1.dx1|e2"
    assert format_column("d2", (1, 0, 1)) == "dxi2*dx2|e1"
    assert format_column("d3", (0, 1, 1)) == "dx1.dx2|d2"
    with pytest.raises(StructuralError):
        format_column("d4", (0,))


def test_d1_is_block_diagonal_in_the_section() -> None:
    problem = golden_problem()
    s1, s2 = problem.section.components
    d1 = build_d1(problem)
    assert d1.shape == (6, 12)
    grid = d1.grid()
    for r in range(6):
        for c in range(12):
            expected = s1 if c == r else s2 if c == r + 6 else 0
            assert grid[r][c] == expected


def test_d2_matches_the_printed_layout() -> None:
    problem = golden_problem()
    s1, s2 = problem.section.components
    d2 = build_d2(problem)
    assert d2.shape == (6, 8)
    zero = Poly.zero(XY)
    columns = [list(col) for col in zip(*d2.grid())]
    for offset, s in ((0, s1), (4, s2)):
        a, b = s.partial(0), s.partial(1)
        assert columns[offset + 0] == [a, b, zero, zero, zero, zero]
        assert columns[offset + 1] == [zero, a, b, zero, zero, zero]
        assert columns[offset + 2] == [zero, zero, zero, a, b, zero]
        assert columns[offset + 3] == [zero, zero, zero, zero, a, b]


def test_d3_matches_the_printed_layout() -> None:
    problem = golden_problem()
    s1, s2 = problem.section.components
    d3 = build_d3(problem)
    assert d3.shape == (6, 6)
    zero = Poly.zero(XY)
    columns = [list(col) for col in zip(*d3.grid())]
    for c in range(6):
        pair, direction = c // 2, c % 2
        expected = [zero] * 6
        expected[pair] = s1.partial(direction)
        expected[pair + 3] = s2.partial(direction)
        assert columns[c] == expected


def test_operators_for_a_zero_rank_bundle() -> None:
    problem = Amp1Problem(Section(XY, ()))
    operators = build_operators(problem)
    assert [m.shape for m in operators] == [(0, 0), (0, 0), (0, 6)]
    assert isinstance(decide(problem), Vanishes)


def test_baby_example_has_unit_rows_and_a_constant_certificate() -> None:
    problem = amp1(XY, "x1", "x1*x2", points=[(0, 0), (0, 5)])
    assert unit_rows(build_d2(problem)) == [(0, 0, 0), (0, 0, 1), (1, 0, 0), (1, 0, 1)]
    cocycle = cocycle_closed_form(problem)
    assert dict(cocycle.entries) == {(0, 1, 1): Poly.constant(XY, 1)}
    verdict = decide(problem)
    assert isinstance(verdict, Vanishes)
    assert verdict.degree == 0
    assert replay_certificate(cocycle, build_operators(problem), verdict.certificate)


def test_closed_form_with_a_full_connection() -> None:
    x = parse_poly("x", X)
    triple = ConnectionTriple(X, 1, gamma_m={(0, 0, 0): 1}, gamma_e={(0, 0, 0): x}, beta={(0, 0, 0, 0): 2})
    problem = Amp1Problem(amp1(X, "x").section, triple)
    expected = parse_poly("x^3 - x^2 + 5*x - 1", X)
    assert cocycle_closed_form(problem).entry(0, 0, 0) == expected
    assert cocycle_definitional(problem) == cocycle_closed_form(problem)
    # diagonal coefficients are halved
    assert cocycle_closed_form(problem).coefficients()[(0, 0, 0)] == expected * Fraction(1, 2)


def test_invalid_connection_is_refused() -> None:
    triple = ConnectionTriple(XY, 1, gamma_e={(0, 0, 0): parse_poly("x2", XY)})
    problem = Amp1Problem(amp1(XY, "x1").section, triple)
    with pytest.raises(InvalidConnectionError) as excinfo:
        cocycle_closed_form(problem)
    assert excinfo.value.violations[0].kind == "beta"
    with pytest.raises(InvalidConnectionError):
        cocycle_definitional(problem)


@pytest.mark.parametrize(
    "names, components, point, order",
    [
        (XY, ("x1*x2",), (0, 0), 0),
        (X, ("x^2",), (0,), 0),
        (X, ("x^3",), (0,), 1),
        (XY, ("x1", "x2^2"), (0, 0), 0),
    ],
)
def test_jet_obstructions(names, components, point, order) -> None:
    problem = amp1(names, *components, points=[point])
    verdict = decide(problem)
    assert isinstance(verdict, NonVanishing)
    assert verdict.witness_point == tuple(Fraction(v) for v in point)
    assert verdict.jet_order == order
    assert replay_witness(problem, verdict)
    assert VERDICT_EXIT_CODES[verdict.kind] == 1


def test_jet_feasibility_is_monotone_in_the_order() -> None:
    problem = amp1(X, "x^3", points=[(0,)])
    cocycle = cocycle_closed_form(problem)
    operators = build_operators(problem)
    results = [jet_obstruction(problem, cocycle, operators, (0,), order) for order in range(4)]
    assert results == [JetResult.FEASIBLE] + [JetResult.INFEASIBLE] * 3
    # away from the origin x^3 is a submersion
    assert jet_obstruction(problem, cocycle, operators, (1,), 3) is JetResult.FEASIBLE


def test_linear_sections_vanish_trivially() -> None:
    verdict = decide(amp1(XY, "x1 - x2", "x1 + 2*x2 - 3", points=[(1, 1)]))
    assert isinstance(verdict, Vanishes)
    assert dict(verdict.certificate) == {}
    assert verdict.degree == 0


def test_dual_section_shortcut() -> None:
    problem = amp1(X, "1", "x^2")
    cocycle = cocycle_closed_form(problem)
    certificate = dual_section_certificate(problem, cocycle)
    assert certificate == {("d1", (0, 1, 0, 0)): Poly.constant(X, 1)}
    verdict = decide(problem)
    assert isinstance(verdict, Vanishes)
    assert replay_certificate(cocycle, build_operators(problem), verdict.certificate)


def test_certificate_search_at_degree_zero() -> None:
    # the d3 column dx2.dx2|d1 carries the constant d_1 s = 1
    problem = amp1(XY, "x1 + x2^2", points=[(0, 0), (-1, 1)])
    cocycle = cocycle_closed_form(problem)
    operators = build_operators(problem)
    found = certificate_search(problem, cocycle, operators, 0)
    assert found is not None
    assert replay_certificate(cocycle, operators, found)
    verdict = decide(problem)
    assert isinstance(verdict, Vanishes)
    assert replay_certificate(cocycle, operators, verdict.certificate)


def test_unknown_when_no_certificate_exists_up_to_the_bound() -> None:
    # no zero points, so the jet scan cannot produce a witness
    verdict = decide(Amp1Problem(amp1(X, "x^2").section, degree_bound=3))
    assert verdict == Unknown(3, 4)
    assert VERDICT_EXIT_CODES[verdict.kind] == 2


def test_off_locus_points_are_rejected() -> None:
    with pytest.raises(ValidationError, match="not a zero of the section"):
        decide(amp1(X, "x", points=[(1,)]))


def test_default_degree_bound() -> None:
    assert default_degree_bound(amp1(XY, "x1^3", "x2").section) == 8
    assert default_degree_bound(amp1(XY, "0").section) == 2


def test_lie_derivative_matches_the_three_operators(rng: random.Random) -> None:
    for _ in range(6):
        n, m = rng.randint(1, 2), rng.randint(1, 2)
        names = variables(n)
        problem = Amp1Problem(random_section(rng, n, m, 2))
        operators = build_operators(problem)
        coefficients = {
            matrix.kind: {col: random_poly(rng, names, 1, 0.5) for col in matrix.columns}
            for matrix in operators
        }
        F = tensor_from_coefficients(problem, **coefficients)
        moved = tensor_coefficients(lie_derivative_tensor(interior_product(problem.section), F))

        expected: dict = {}
        for matrix in operators:
            sign = -1 if matrix.kind == "d3" else 1
            for row, value in matrix.apply(coefficients[matrix.kind]).items():
                expected[row] = expected.get(row, Poly.zero(names)) + value * sign
        assert moved == {row: value for row, value in expected.items() if value}


def test_change_coordinates_moves_points_and_keeps_the_verdict() -> None:
    problem = amp1(XY, "x1*x2", points=[(0, 0), (1, 0)])
    moved = change_coordinates(problem, [[1, 1], [0, 1]], [[2]])
    assert moved.section.components[0] == parse_poly("2*x1*x2 + 2*x2^2", XY)
    assert moved.zero_points == ((0, 0), (1, 0))
    assert type(decide(moved)) is type(decide(problem))

    with pytest.raises(StructuralError):
        change_coordinates(problem, [[1, 1], [1, 1]], [[1]])
    triple = ConnectionTriple(XY, 1, gamma_m={(0, 0, 0): 1})
    with pytest.raises(StructuralError):
        change_coordinates(Amp1Problem(problem.section, triple), [[1, 0], [0, 1]], [[1]])


def test_change_coordinates_moves_the_jet_witness() -> None:
    problem = amp1(XY, "(x1 - 1)^2 + x2^2", "x1 - 1 - x2", points=[(1, 0)])
    before = decide(problem)
    assert isinstance(before, NonVanishing)
    assert before.witness_point == (1, 0)

    # A^{-1} = [[1, -1], [-1, 2]] sends (1, 0) to (1, -1)
    moved = change_coordinates(problem, [[2, 1], [1, 1]], [[1, 1], [0, 3]])
    assert moved.zero_points == ((1, -1),)
    after = decide(moved)
    assert isinstance(after, NonVanishing)
    assert after.witness_point == (1, -1)
    assert after.jet_order == before.jet_order
    assert replay_witness(moved, after)
