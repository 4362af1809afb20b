from __future__ import annotations

import random
from itertools import combinations

import pytest

from conftest import random_poly, random_section, section, variables
from dg_atiyah.errors import StructuralError
from dg_atiyah.graded import (
    GradedVectorField,
    SuperFunction,
    TensorField,
    bracket,
    interior_product,
)
from dg_atiyah.utils.expression_parser import parse_poly

XY = ("x1", "x2")


def xi(k: int, m: int = 3, names=XY) -> SuperFunction:
    return SuperFunction.xi(names, m, k)


def random_function(rng: random.Random, names, m: int, length: int) -> SuperFunction:
    """Homogeneous of degree -length."""
    terms = {key: random_poly(rng, names, 2, 0.4) for key in combinations(range(m), length)}
    return SuperFunction(names, m, terms)


def random_field(rng: random.Random, names, m: int, degree: int) -> GradedVectorField:
    """Homogeneous of the given degree: x-parts of degree d, xi-parts of degree d - 1."""
    xs = [
        random_function(rng, names, m, -degree) if degree <= 0 else SuperFunction.zero(names, m)
        for _ in names
    ]
    xis = [
        random_function(rng, names, m, 1 - degree) if 1 - degree <= m else SuperFunction.zero(names, m)
        for _ in range(m)
    ]
    return GradedVectorField(names, m, xs, xis)


def test_xi_anticommute_and_square_to_zero() -> None:
    assert xi(0) * xi(1) == -(xi(1) * xi(0))
    assert xi(2) * xi(2) == 0
    assert str(xi(1) * xi(0)) == "-xi1*xi2"


def test_partial_xi_is_a_left_derivative() -> None:
    f = xi(0) * xi(1) * xi(2)
    assert f.partial_xi(0) == xi(1) * xi(2)
    assert f.partial_xi(1) == -(xi(0) * xi(2))
    assert f.partial_xi(2) == xi(0) * xi(1)


def test_mixing_spaces_is_rejected() -> None:
    with pytest.raises(StructuralError):
        xi(0) + SuperFunction.xi(XY, 2, 0)


def test_degrees_of_functions_and_fields() -> None:
    assert (xi(0) * xi(1)).degree == -2
    assert SuperFunction.zero(XY, 3).degree is None
    assert GradedVectorField.fiber(XY, 3, 0).degree == 1
    assert GradedVectorField.coordinate(XY, 3, 1).degree == 0
    mixed = GradedVectorField.coordinate(XY, 3, 0) + GradedVectorField.fiber(XY, 3, 0)
    assert not mixed.is_homogeneous()
    with pytest.raises(StructuralError):
        mixed.degree


def test_interior_product_contracts_the_section() -> None:
    s = section(XY, "x1*x2", "x1 - 1")
    Q = interior_product(s)
    f = SuperFunction.xi(XY, 2, 0) * SuperFunction.xi(XY, 2, 1)
    # iota_s(xi1 xi2) = s^1 xi2 - xi1 s^2
    expected = (
        SuperFunction.from_poly(s.components[0], 2) * SuperFunction.xi(XY, 2, 1)
        - SuperFunction.xi(XY, 2, 0) * SuperFunction.from_poly(s.components[1], 2)
    )
    assert Q.apply(f) == expected
    assert Q.degree == 1


def test_bracket_of_coordinate_fields_with_q() -> None:
    s = section(XY, "x1^2*x2")
    Q = interior_product(s)
    moved = bracket(Q, GradedVectorField.coordinate(XY, 1, 0))
    assert moved.xi_components[0].body() == parse_poly("-2*x1*x2", XY)
    assert not any(moved.x_components)


def test_supercommutativity(rng: random.Random) -> None:
    names = variables(2)
    for _ in range(34):
        m = rng.randint(1, 3)
        f = random_function(rng, names, m, rng.randint(0, m))
        g = random_function(rng, names, m, rng.randint(0, m))
        if not f or not g:
            continue
        sign = -1 if (f.degree * g.degree) % 2 else 1
        assert f * g == (g * f) * sign


def test_homological_field_squares_to_zero(rng: random.Random) -> None:
    for _ in range(34):
        s = random_section(rng, rng.randint(1, 3), rng.randint(1, 3), rng.randint(0, 3))
        Q = interior_product(s)
        assert not bracket(Q, Q)


def test_graded_antisymmetry_and_jacobi(rng: random.Random) -> None:
    names = variables(2)
    for _ in range(34):
        m = rng.randint(1, 2)
        X, Y, Z = (random_field(rng, names, m, rng.choice([-1, 0, 1])) for _ in range(3))
        dx, dy = X.degree or 0, Y.degree or 0
        sign = -1 if (dx * dy) % 2 else 1

        assert bracket(X, Y) == -bracket(Y, X).scale(sign)

        left = bracket(X, bracket(Y, Z))
        right = bracket(bracket(X, Y), Z) + bracket(Y, bracket(X, Z)).scale(sign)
        assert left == right


def test_tensor_field_extends_graded_bilinearly() -> None:
    m = 1
    names = ("x",)
    dx = ("x", 0)
    value = GradedVectorField.fiber(names, m, 0)
    F = TensorField(names, m, 0, {(dx, dx): value})
    x_field = GradedVectorField.coordinate(names, m, 0)
    a = SuperFunction.xi(names, m, 0)
    # F(aX, Y) with |a| = -1, k = 0 has no sign; F(X, aY) picks (-1)^{|a|(k + |X|)} = 1
    assert F.evaluate(x_field.scale(a), x_field) == value.scale(a)
    assert F.evaluate(x_field, x_field.scale(a)) == value.scale(a)
    G = TensorField(names, m, 1, {(dx, dx): value})
    # with k = 1 the coefficient crosses the tensor: sign (-1)^{|a|}
    assert G.evaluate(x_field.scale(a), x_field) == -value.scale(a)
