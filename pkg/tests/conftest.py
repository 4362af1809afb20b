from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

import pytest

from dg_atiyah.atiyah import Amp1Problem
from dg_atiyah.connection import ConnectionTriple
from dg_atiyah.graded import Section
from dg_atiyah.ring import Poly, monomials_up_to
from dg_atiyah.utils.expression_parser import parse_poly


def _repo_root() -> Path:
    return Path(__file__).resolve().parents[1]


@pytest.fixture
def corpus_dir() -> Path:
    return _repo_root() / "corpus"


def variables(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


def section(names: tuple[str, ...], *components: str) -> Section:
    return Section(names, tuple(parse_poly(c, names) for c in components))


def amp1(names: tuple[str, ...], *components: str, points=()) -> Amp1Problem:
    return Amp1Problem(section(names, *components), None, tuple(points))


def random_poly(rng: random.Random, names: tuple[str, ...], degree: int, density: float = 0.5) -> Poly:
    terms = {}
    for exponent in monomials_up_to(len(names), degree):
        if rng.random() < density:
            terms[exponent] = Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2]))
    return Poly(names, terms)


def random_section(rng: random.Random, n: int, m: int, degree: int) -> Section:
    names = variables(n)
    return Section(names, tuple(random_poly(rng, names, degree) for _ in range(m)))


def random_triple(rng: random.Random, n: int, m: int, degree: int, density: float = 0.3) -> ConnectionTriple:
    """A valid triple: symmetric Gamma^M, any Gamma^E, beta = S - R/2."""
    names = variables(n)

    def maybe():
        return random_poly(rng, names, degree, density) if rng.random() < density else Poly.zero(names)

    gamma_m = {}
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                value = maybe()
                gamma_m[(i, j, k)] = value
                gamma_m[(j, i, k)] = value
    gamma_e = {(i, a, k): maybe() for i in range(n) for a in range(m) for k in range(m)}
    symmetric = {(i, j, a, k): maybe() for i in range(n) for j in range(n) for a in range(m) for k in range(m)}
    return ConnectionTriple.compatible(names, m, gamma_m, gamma_e, symmetric)


@pytest.fixture(params=[11, 23, 47])
def rng(request) -> random.Random:
    return random.Random(request.param)
